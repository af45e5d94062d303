"""Truth sets of formulas over models.

The order connectives always read the same way:

    x ⊨ a -> b   iff every y ≥ x in [[a]] is in [[b]]
    x ⊨ a -< b   iff some  y ≤ x is in [[a]] but not [[b]]

Modal clauses depend on the model's flavor.  Each flavor resolves a
modal operator to an effective relation and then applies the usual
clause (box: all successors, diamond: some successor):

    flavor     []i          <>j          <|i           |>j
    standard   R_i          S_j          -             -
    fs         ≤∘R          R            -             -
    gpt        ≤∘R          S            R̆             ≤∘S̆
    tense      R            S            R̆             S̆
    h          R            ≥∘R∘≥        R̆             ≤∘R̆∘≤
    ek         R_i          -            -             -

where R̆ is the converse.  The h row derives its diamond from the box
relation: the left converse ≥∘R∘≥ is what keeps truth sets upward
closed with only one stored relation.  Common knowledge C is evaluable
on ek models only and quantifies over chains of knowledge steps (the
positive transitive closure of the union; pass ck_reflexive=True for
the reflexive variant).

Truth sets are cached on the model, keyed by formula, so repeated
evaluation during bisimulation checks stays cheap.
"""

from __future__ import annotations

from typing import Iterable

from . import relations as rel
from .errors import FlavorError, PreconditionError
from .formula import (And, Atom, Bot, Box, Ck, Dia, Formula, Imp, Or, Sub,
                      TBox, TDia, Top)
from .model import EK, FS, GPT, H, STANDARD, TENSE, Model

transitive_closure = rel.transitive_closure


def left_converse(r: frozenset, m: Model) -> frozenset:
    """≥ ∘ r ∘ ≥ : the derived diamond relation of single-relation
    bi-intuitionistic models."""
    return rel.compose_all(m.geq, r, m.geq)


def _stored_box(m: Model, index: int) -> frozenset:
    if not 1 <= index <= len(m.boxes):
        raise FlavorError(
            f"model has no box relation {index} (flavor {m.flavor!r} "
            f"stores {len(m.boxes)})")
    return m.boxes[index - 1]


def _stored_dia(m: Model, index: int) -> frozenset:
    if not 1 <= index <= len(m.diamonds):
        raise FlavorError(
            f"model has no diamond relation {index} (flavor {m.flavor!r} "
            f"stores {len(m.diamonds)})")
    return m.diamonds[index - 1]


def box_relation(m: Model, index: int) -> frozenset:
    """Effective relation whose universal image interprets []index."""
    if m.flavor in (STANDARD, TENSE, H, EK):
        return _stored_box(m, index)
    if m.flavor in (FS, GPT):
        return rel.compose(m.leq, _stored_box(m, index))
    raise FlavorError(f"flavor {m.flavor!r} does not interpret []")


def dia_relation(m: Model, index: int) -> frozenset:
    """Effective relation whose existential image interprets <>index."""
    if m.flavor in (STANDARD, GPT, TENSE):
        return _stored_dia(m, index)
    if m.flavor == FS:
        return _stored_box(m, index)
    if m.flavor == H:
        return left_converse(_stored_box(m, index), m)
    raise FlavorError(f"flavor {m.flavor!r} does not interpret <>")


def back_dia_relation(m: Model, index: int) -> frozenset:
    """Effective relation for <|index, which looks backward along the
    box relation."""
    if m.flavor in (GPT, TENSE, H):
        return rel.converse(_stored_box(m, index))
    raise FlavorError(f"flavor {m.flavor!r} does not interpret <|")


def back_box_relation(m: Model, index: int) -> frozenset:
    """Effective relation for |>index, which looks backward along the
    diamond relation."""
    if m.flavor == TENSE:
        return rel.converse(_stored_dia(m, index))
    if m.flavor == GPT:
        return rel.compose(m.leq, rel.converse(_stored_dia(m, index)))
    if m.flavor == H:
        return rel.compose_all(m.leq, rel.converse(_stored_box(m, index)),
                               m.leq)
    raise FlavorError(f"flavor {m.flavor!r} does not interpret |>")


def ck_relation(m: Model, reflexive: bool = False) -> frozenset:
    """Chains of knowledge steps: the transitive closure of the union
    of all knowledge relations, reflexive on demand."""
    if m.flavor != EK:
        raise FlavorError(f"flavor {m.flavor!r} does not interpret C")
    return rel.transitive_closure(m.boxes, reflexive=reflexive,
                                  states=m.states)


def _forall(states, relation, a) -> frozenset:
    succ = rel.successors(relation)
    return frozenset(x for x in states if succ.get(x, frozenset()) <= a)


def _exists(states, relation, a) -> frozenset:
    succ = rel.successors(relation)
    return frozenset(x for x in states if succ.get(x, frozenset()) & a)


def truth_set(f: Formula, m: Model, ck_reflexive: bool = False) -> frozenset:
    """All states of m where f holds."""
    key = (f, ck_reflexive)
    cached = m._eval_cache.get(key)
    if cached is not None:
        return cached

    def ev(g: Formula) -> frozenset:
        return truth_set(g, m, ck_reflexive)

    if isinstance(f, Atom):
        out = m.valuation.get(f.name, frozenset())
    elif isinstance(f, Top):
        out = m.state_set
    elif isinstance(f, Bot):
        out = frozenset()
    elif isinstance(f, And):
        out = ev(f.left) & ev(f.right)
    elif isinstance(f, Or):
        out = ev(f.left) | ev(f.right)
    elif isinstance(f, Imp):
        a, b = ev(f.left), ev(f.right)
        out = frozenset(x for x in m.states
                        if m.up_map[x] & a <= b)
    elif isinstance(f, Sub):
        a, b = ev(f.left), ev(f.right)
        out = frozenset(x for x in m.states
                        if m.down_map[x] & a - b)
    elif isinstance(f, Box):
        out = _forall(m.states, box_relation(m, f.index), ev(f.body))
    elif isinstance(f, Dia):
        out = _exists(m.states, dia_relation(m, f.index), ev(f.body))
    elif isinstance(f, TDia):
        out = _exists(m.states, back_dia_relation(m, f.index), ev(f.body))
    elif isinstance(f, TBox):
        out = _forall(m.states, back_box_relation(m, f.index), ev(f.body))
    elif isinstance(f, Ck):
        out = _forall(m.states, ck_relation(m, ck_reflexive), ev(f.body))
    else:
        raise FlavorError(f"no evaluation clause for {type(f).__name__}")
    m._eval_cache[key] = out
    return out


_BINARY_OPS = ("arrow", "coarrow")


def semantic_operator(kind: str, m: Model, a: frozenset,
                      b: frozenset | None = None) -> frozenset:
    """Apply one set-level connective.  Kinds: "arrow" and "coarrow"
    are binary; "boxbar_i" and "diabar_j" are unary with the relation
    index baked into the name.  Arguments must be upsets, since the
    operators are only meaningful on the upset lattice."""
    for arg in (a, b):
        if arg is not None and not rel.is_upset(m.leq, frozenset(arg)):
            raise PreconditionError(
                f"semantic operator arguments must be upsets; "
                f"{sorted(arg)} is not upward closed")
    if kind in _BINARY_OPS:
        if b is None:
            raise ValueError(f"{kind} needs two arguments")
        if kind == "arrow":
            return frozenset(x for x in m.states if m.up_map[x] & a <= b)
        return frozenset(x for x in m.states if m.down_map[x] & a - b)
    if b is not None:
        raise ValueError(f"{kind} takes one argument")
    name, _, suffix = kind.rpartition("_")
    if name in ("boxbar", "diabar") and suffix.isdigit():
        index = int(suffix)
        if name == "boxbar":
            return _forall(m.states, box_relation(m, index), a)
        return _exists(m.states, dia_relation(m, index), a)
    raise ValueError(f"unknown semantic operator {kind!r}")
