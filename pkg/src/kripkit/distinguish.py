"""Distinguishing formulas and the constructive Hennessy-Milner check.

greatest_bisimulation leaves a trace: every discarded pair fell to a
named clause with an unmatched transition.  Replaying that trace in
stage order turns each removal into a concrete formula separating the
two states, built only from witnesses of earlier stages:

    owner   the side whose transition nobody matched
    t       the target of that transition
    cover   the other side's candidate targets; every pair of t with
            a cover element died earlier, so each has a witness

    Φ = conjunction of earlier witnesses true at t
    Ψ = disjunction of earlier witnesses true at a cover element

Box-shaped clauses (order_forth/order_back, box, tbox) yield a formula
true on the non-owner side: the bare implication Φ -> Ψ, or that
implication under the clause's box.  Diamond-shaped clauses
(dual_forth/dual_back, dia, tdia) yield Φ -< Ψ, possibly under the
clause's diamond, true on the owner side.  T -> χ collapses to χ and
χ -< F to χ, which keeps witnesses readable (and reproduces textbook
separators like nested boxes over F).

The argument that Φ -> Ψ behaves needs the cover to be closed upward,
which is why synthesis insists on strictly condensed models whenever a
modal clause is in play; the order clauses get closure from
transitivity alone.  Every witness is re-evaluated in both models
before it is returned, so a recipe bug shows up as an internal error,
never as silently wrong output.

bounded_equivalence_oracle goes the other way around: it saturates the
fragment's formula algebra over both models at once, cheapest formula
first, and declares two states equivalent when no generated formula
splits them.  hennessy_milner_check ties the two together.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from . import relations as rel
from . import semantics
from .bisim import (ConditionSet, clause_kind, conditions_for,
                    greatest_bisimulation, resolved_tasks)
from .errors import InternalCheckError, PreconditionError
from .formula import (And, Atom, Bot, Box, Dia, Formula, Fragment, Imp, Or,
                      Sub, TBox, TDia, Top, connective_count)
from .model import Model, require_valid

_EMPTY = frozenset()


@dataclass(frozen=True)
class Witness:
    """A formula separating one removed pair: true at the state on the
    `orientation` side, false at the other.  The stage bounds its
    nesting depth."""

    pair: tuple[str, str]
    formula: Formula
    orientation: str  # "left" or "right"
    stage: int

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "formula": str(self.formula),
                "orientation": self.orientation, "stage": self.stage}


def _dedup_and_sort(formulas, m: Model, m2: Model) -> list[Formula]:
    """Drop formulas with duplicate truth sets (in both models at
    once), keeping the smallest, and order the survivors."""
    best: dict = {}
    for f in formulas:
        key = (semantics.truth_set(f, m), semantics.truth_set(f, m2))
        rank = (connective_count(f), str(f))
        if key not in best or rank < best[key][0]:
            best[key] = (rank, f)
    return [f for _, f in sorted(best.values(), key=lambda pair: pair[0])]


def _fold(combine, items: list[Formula], empty: Formula) -> Formula:
    if not items:
        return empty
    return reduce(combine, items)


def _check_witnessable(conditions: ConditionSet, frag: Fragment) -> None:
    if (conditions.boxes or conditions.tboxes) and frag.base == "intdual":
        raise PreconditionError(
            "box-shaped witnesses need implication, which base 'intdual' "
            "lacks; no synthesis recipe is known for this combination")
    if (conditions.diamonds or conditions.tdias) and frag.base == "int":
        raise PreconditionError(
            "diamond-shaped witnesses need subtraction, which base 'int' "
            "lacks; no synthesis recipe is known for this combination")


def synthesize(m: Model, m2: Model, frag: Fragment):
    """Compute the greatest bisimulation for the fragment's clause set
    and a verified distinguishing formula for every discarded pair.

    Returns (fixpoint relation, list of Witness in removal order).
    """
    if m.flavor != m2.flavor:
        raise PreconditionError(
            f"models have different flavors: {m.flavor!r} vs {m2.flavor!r}")
    conditions = conditions_for(frag, m.flavor)
    _check_witnessable(conditions, frag)
    require_valid(m, "synthesize")
    require_valid(m2, "synthesize")
    modal_clauses = (conditions.boxes or conditions.diamonds
                     or conditions.tdias or conditions.tboxes)
    if modal_clauses:
        for side, model in (("left", m), ("right", m2)):
            if not model.validate().strictly_condensed:
                raise PreconditionError(
                    f"{side} model is not strictly condensed; witness "
                    "synthesis over modal clauses needs that (strictify "
                    "the model first)")

    fixpoint, trace = greatest_bisimulation(m, m2, conditions)
    tasks = {t.clause: t for t in resolved_tasks(conditions, m, m2)}
    by_pair: dict[tuple[str, str], Witness] = {}
    out: list[Witness] = []

    for removal in trace.removals:
        x, x2 = removal.pair
        if removal.clause == "atoms":
            atom = removal.transition[0]
            formula: Formula = Atom(atom)
            orientation = ("left" if x in m.valuation.get(atom, _EMPTY)
                           else "right")
        else:
            task = tasks[removal.clause]
            shape, index = clause_kind(removal.clause)
            owner = removal.side
            t = removal.transition[1]
            if owner == "left":
                cover = task.right.get(x2, _EMPTY)
                earlier = [(t, c) for c in sorted(cover)]
            else:
                cover = task.left.get(x, _EMPTY)
                earlier = [(c, t) for c in sorted(cover)]
            true_at_t: list[Formula] = []
            true_at_cover: list[Formula] = []
            for pair in earlier:
                w = by_pair.get(pair)
                if w is None:
                    raise InternalCheckError(
                        f"trace replay hit pair {pair} with no witness "
                        f"while handling {removal.pair}")
                if w.orientation == owner:
                    true_at_t.append(w.formula)
                else:
                    true_at_cover.append(w.formula)
            phi = _fold(And, _dedup_and_sort(true_at_t, m, m2), Top())
            psi = _fold(Or, _dedup_and_sort(true_at_cover, m, m2), Bot())
            if shape in ("imp", "box", "tbox"):
                core = psi if isinstance(phi, Top) else Imp(phi, psi)
                if shape == "box":
                    formula = Box(index, core)
                elif shape == "tbox":
                    formula = TBox(index, core)
                else:
                    formula = core
                orientation = "right" if owner == "left" else "left"
            else:
                core = phi if isinstance(psi, Bot) else Sub(phi, psi)
                if shape == "dia":
                    formula = Dia(index, core)
                elif shape == "tdia":
                    formula = TDia(index, core)
                else:
                    formula = core
                orientation = owner

        holds_left = x in semantics.truth_set(formula, m)
        holds_right = x2 in semantics.truth_set(formula, m2)
        want = (True, False) if orientation == "left" else (False, True)
        if (holds_left, holds_right) != want:
            raise InternalCheckError(
                f"synthesized witness for {removal.pair} does not separate "
                f"(clause {removal.clause}): {formula}")
        witness = Witness(removal.pair, formula, orientation, removal.stage)
        by_pair[removal.pair] = witness
        out.append(witness)
    return fixpoint, out


def verify_witnesses(witnesses: Iterable[Witness], m: Model,
                     m2: Model) -> list[str]:
    """Re-evaluate each witness in both models.  Returns one message
    per witness that fails to separate its pair; empty means all
    hold."""
    problems = []
    for w in witnesses:
        x, x2 = w.pair
        got = (x in semantics.truth_set(w.formula, m),
               x2 in semantics.truth_set(w.formula, m2))
        want = (True, False) if w.orientation == "left" else (False, True)
        if got != want:
            problems.append(
                f"witness for pair {w.pair} does not separate: {w.formula}")
    return problems


# ---------------------------------------------------------------------------
# Equivalence by formula saturation


class _SideOps:
    """Bitmask semantics for one model: every fragment connective as
    an integer operation, states numbered by sorted order."""

    def __init__(self, m: Model, frag: Fragment):
        self.m = m
        self.index = {s: i for i, s in enumerate(m.states)}
        self.full = (1 << len(m.states)) - 1
        self.up = [self.mask(m.up_map[s]) for s in m.states]
        self.down = [self.mask(m.down_map[s]) for s in m.states]
        self.box_succ = {i: self._succ_masks(semantics.box_relation(m, i))
                         for i in range(1, frag.n_boxes + 1)}
        self.dia_succ = {j: self._succ_masks(semantics.dia_relation(m, j))
                         for j in range(1, frag.m_diamonds + 1)}
        self.tdia_succ = {}
        self.tbox_succ = {}
        if frag.tense:
            self.tdia_succ = {
                i: self._succ_masks(semantics.back_dia_relation(m, i))
                for i in range(1, frag.n_boxes + 1)}
            self.tbox_succ = {
                j: self._succ_masks(semantics.back_box_relation(m, j))
                for j in range(1, frag.m_diamonds + 1)}

    def mask(self, xs) -> int:
        out = 0
        for x in xs:
            out |= 1 << self.index[x]
        return out

    def _succ_masks(self, relation) -> list[int]:
        raw = rel.successors(relation)
        return [self.mask(raw.get(s, _EMPTY)) for s in self.m.states]

    def imp(self, a: int, b: int) -> int:
        return sum(1 << i for i, up in enumerate(self.up)
                   if not (up & a & ~b))

    def sub(self, a: int, b: int) -> int:
        return sum(1 << i for i, down in enumerate(self.down)
                   if down & a & ~b)

    def forall(self, succ: list[int], a: int) -> int:
        return sum(1 << i for i, s in enumerate(succ) if not (s & ~a))

    def exists(self, succ: list[int], a: int) -> int:
        return sum(1 << i for i, s in enumerate(succ) if s & a)


def bounded_equivalence_oracle(m: Model, m2: Model, frag: Fragment,
                               budget: int | None = None):
    """Which state pairs agree on every fragment formula, decided by
    saturating formula semantics over both models at once.

    Formulas are explored as signature pairs (truth set here, truth
    set there), cheapest connective count first, so two formulas with
    the same signatures are never both expanded.  The budget caps how
    many derived signatures are admitted: exhausting the worklist
    first means the answer is exact; hitting the budget means the
    returned relation may still be too coarse.  Budget 0 gives plain
    atom agreement.

    Returns (relation, exact).
    """
    left, right = _SideOps(m, frag), _SideOps(m2, frag)
    atoms = sorted(set(m.valuation) | set(m2.valuation))

    unary = []
    for i in sorted(left.box_succ):
        unary.append((lambda a, i=i: left.forall(left.box_succ[i], a),
                      lambda a, i=i: right.forall(right.box_succ[i], a)))
    for j in sorted(left.dia_succ):
        unary.append((lambda a, j=j: left.exists(left.dia_succ[j], a),
                      lambda a, j=j: right.exists(right.dia_succ[j], a)))
    for i in sorted(left.tdia_succ):
        unary.append((lambda a, i=i: left.exists(left.tdia_succ[i], a),
                      lambda a, i=i: right.exists(right.tdia_succ[i], a)))
    for j in sorted(left.tbox_succ):
        unary.append((lambda a, j=j: left.forall(left.tbox_succ[j], a),
                      lambda a, j=j: right.forall(right.tbox_succ[j], a)))
    binary = [(lambda a, b: a[0] & b[0], lambda a, b: a[1] & b[1], True),
              (lambda a, b: a[0] | b[0], lambda a, b: a[1] | b[1], True)]
    if frag.base in ("int", "biint"):
        binary.append((lambda a, b: left.imp(a[0], b[0]),
                       lambda a, b: right.imp(a[1], b[1]), False))
    if frag.base in ("intdual", "biint"):
        binary.append((lambda a, b: left.sub(a[0], b[0]),
                       lambda a, b: right.sub(a[1], b[1]), False))

    closed: dict[tuple[int, int], int] = {}
    for sig in ([(0, 0), (left.full, right.full)]
                + [(left.mask(m.valuation.get(a, _EMPTY)),
                    right.mask(m2.valuation.get(a, _EMPTY))) for a in atoms]):
        closed.setdefault(sig, 0)

    heap: list = []
    tick = 0
    cheapest_pushed: dict[tuple[int, int], int] = {}

    def push(sig, cost):
        nonlocal tick
        if sig in closed:
            return
        prior = cheapest_pushed.get(sig)
        if prior is not None and prior <= cost:
            return
        cheapest_pushed[sig] = cost
        tick += 1
        heapq.heappush(heap, (cost, tick, sig))

    def expand(sig):
        cost = closed[sig]
        for fl, fr in unary:
            push((fl(sig[0]), fr(sig[1])), cost + 1)
        for fl, fr, commutes in binary:
            for other, other_cost in list(closed.items()):
                push((fl(sig, other), fr(sig, other)), cost + other_cost + 1)
                if not commutes:
                    push((fl(other, sig), fr(other, sig)),
                         cost + other_cost + 1)

    for sig in list(closed):
        expand(sig)

    derived = 0
    exact = True
    while heap:
        cost, _, sig = heapq.heappop(heap)
        if sig in closed:
            continue
        if budget is not None and derived >= budget:
            exact = False
            break
        closed[sig] = cost
        derived += 1
        expand(sig)

    pairs = set()
    for x, ix in left.index.items():
        for y, iy in right.index.items():
            if all((sig_l >> ix) & 1 == (sig_r >> iy) & 1
                   for sig_l, sig_r in closed):
                pairs.add((x, y))
    return frozenset(pairs), exact


@dataclass(frozen=True)
class HMReport:
    """Outcome of the two-sided Hennessy-Milner comparison."""

    passed: bool
    fixpoint: frozenset
    oracle: frozenset
    oracle_exact: bool
    witnesses: tuple[Witness, ...]
    problems: tuple[str, ...]


def hennessy_milner_check(m: Model, m2: Model, frag: Fragment,
                          budget: int | None = None) -> HMReport:
    """Confirm both halves of the Hennessy-Milner property on one pair
    of models: every non-bisimilar pair gets a verified distinguishing
    formula, and formula equivalence coincides with the bisimulation
    fixpoint.  An inexact oracle that still matches the fixpoint is
    fine (the true equivalence is squeezed in between); an inexact
    mismatch is reported as undecided."""
    fixpoint, witnesses = synthesize(m, m2, frag)
    problems = verify_witnesses(witnesses, m, m2)
    oracle, exact = bounded_equivalence_oracle(m, m2, frag, budget)
    if oracle != fixpoint:
        extra = sorted(oracle - fixpoint)
        missing = sorted(fixpoint - oracle)
        if missing:
            problems.append(
                f"bisimilar pairs split by some formula: {missing}")
        if extra:
            if exact:
                problems.append(
                    f"formula-equivalent pairs are not bisimilar: {extra}")
            else:
                problems.append(
                    f"oracle budget ran out before separating: {extra}")
    return HMReport(not problems, fixpoint, oracle, exact,
                    tuple(witnesses), tuple(problems))
