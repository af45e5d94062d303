"""Finite Kripke models: a preorder, modal relations, an upset valuation.

A model carries its states, the intuitionistic order leq (written ≤ in
comments), a list of box relations, a list of diamond relations, a
valuation mapping atoms to state sets, and a flavor string saying which
coherence discipline the relations follow:

    standard  n boxes, m diamonds; (≤∘R_i) ⊆ (R_i∘≤), (≥∘S_j) ⊆ (S_j∘≥)
    fs        one relation, stored as boxes[0], read by both box and
              diamond; (R∘≤) ⊆ (≤∘R) and (≥∘R) ⊆ (R∘≥)
    gpt       one R, one S; (R∘≤) ⊆ (≤∘R), (≥∘S) ⊆ (S∘≥)
    tense     one R, one S; (≤∘R) = (R∘≤), (≥∘S) = (S∘≥)
    h         one R with (≤∘R∘≤) ⊆ R; the diamond relation is derived
    ek        n knowledge relations with (≤∘R_i) ⊆ R_i

Composition reads left to right: x (Z∘Z') y means x Z u and u Z' y for
some u.  Models are immutable after construction and all operations
here are pure, so instances are safe to share.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import relations as rel
from .errors import FlavorError, ModelFormatError, PreconditionError

STANDARD = "standard"
FS = "fs"
GPT = "gpt"
TENSE = "tense"
H = "h"
EK = "ek"

FLAVORS = (STANDARD, FS, GPT, TENSE, H, EK)

# stored relation counts per flavor: (boxes, diamonds), None = any number
_SHAPES = {
    STANDARD: (None, None),
    FS: (1, 0),
    GPT: (1, 1),
    TENSE: (1, 1),
    H: (1, 0),
    EK: (None, 0),
}

_ATOM_NAME = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Violation:
    """One broken model axiom with the state path that breaks it.

    The witness traces the offending instance: (x,) for missing
    reflexivity, (x,y,z) for missing transitivity, (atom,x,y) for a
    non-upset valuation, and the composition path, endpoints included,
    for a coherence condition.
    """

    axiom: str
    witness: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.axiom} at ({', '.join(self.witness)})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    strictly_condensed: bool

    @property
    def ok(self) -> bool:
        return not self.violations


class Model:
    """Immutable finite Kripke model.

    The raw constructor stores leq exactly as given; use Model.make or
    the JSON loader to close a generating set of order pairs into a
    preorder.  Frame conditions are never enforced here — validate()
    reports them, so broken models can be built and inspected.
    """

    def __init__(self, states: Iterable[str],
                 leq: Iterable[tuple[str, str]],
                 boxes: Sequence[Iterable[tuple[str, str]]] = (),
                 diamonds: Sequence[Iterable[tuple[str, str]]] = (),
                 valuation: Mapping[str, Iterable[str]] | None = None,
                 flavor: str = STANDARD):
        states = list(states)
        if not states:
            raise ModelFormatError("a model needs at least one state")
        if len(set(states)) != len(states):
            raise ModelFormatError("duplicate state names")
        if not all(isinstance(s, str) and s for s in states):
            raise ModelFormatError("state names must be nonempty strings")
        self.states: tuple[str, ...] = tuple(sorted(states))
        known = frozenset(self.states)

        def checked(pairs, what):
            pairs = frozenset(tuple(p) for p in pairs)
            for a, b in pairs:
                if a not in known or b not in known:
                    raise ModelFormatError(
                        f"{what} mentions unknown state in ({a}, {b})")
            return pairs

        self.leq: frozenset[tuple[str, str]] = checked(leq, "leq")
        self.boxes: tuple[frozenset, ...] = tuple(
            checked(r, f"box relation {i}") for i, r in enumerate(boxes, 1))
        self.diamonds: tuple[frozenset, ...] = tuple(
            checked(s, f"diamond relation {j}")
            for j, s in enumerate(diamonds, 1))

        if flavor not in FLAVORS:
            raise ModelFormatError(f"unknown flavor {flavor!r}")
        want_boxes, want_diamonds = _SHAPES[flavor]
        if want_boxes is not None and len(self.boxes) != want_boxes:
            raise ModelFormatError(
                f"flavor {flavor!r} stores exactly {want_boxes} box "
                f"relation(s), got {len(self.boxes)}")
        if flavor == EK and not self.boxes:
            raise ModelFormatError("flavor 'ek' needs at least one relation")
        if want_diamonds is not None and len(self.diamonds) != want_diamonds:
            raise ModelFormatError(
                f"flavor {flavor!r} stores exactly {want_diamonds} diamond "
                f"relation(s), got {len(self.diamonds)}")
        self.flavor = flavor

        self.valuation: dict[str, frozenset[str]] = {}
        for atom in sorted(valuation or {}):
            if not _ATOM_NAME.match(atom):
                raise ModelFormatError(
                    f"atom name {atom!r} is not a lowercase identifier")
            xs = frozenset(valuation[atom])
            unknown = xs - known
            if unknown:
                raise ModelFormatError(
                    f"valuation of {atom} mentions unknown state "
                    f"{sorted(unknown)[0]!r}")
            self.valuation[atom] = xs
        self._eval_cache: dict = {}
        self._validation: ValidationReport | None = None

    @classmethod
    def make(cls, states: Iterable[str],
             leq_gen: Iterable[tuple[str, str]],
             boxes: Sequence[Iterable[tuple[str, str]]] = (),
             diamonds: Sequence[Iterable[tuple[str, str]]] = (),
             valuation: Mapping[str, Iterable[str]] | None = None,
             flavor: str = STANDARD) -> "Model":
        """Build a model from order generators: leq_gen is closed
        reflexively and transitively over the carrier."""
        states = list(states)
        closed = rel.preorder_closure([tuple(p) for p in leq_gen], states)
        return cls(states, closed, boxes, diamonds, valuation, flavor)

    # -- derived views ---------------------------------------------------

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(self.valuation)

    @cached_property
    def state_set(self) -> frozenset[str]:
        return frozenset(self.states)

    @cached_property
    def geq(self) -> frozenset[tuple[str, str]]:
        return rel.converse(self.leq)

    @cached_property
    def up_map(self) -> dict[str, frozenset[str]]:
        succ = rel.successors(self.leq)
        return {x: frozenset(succ.get(x, ())) for x in self.states}

    @cached_property
    def down_map(self) -> dict[str, frozenset[str]]:
        pred = rel.successors(self.geq)
        return {x: frozenset(pred.get(x, ())) for x in self.states}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (self.states == other.states and self.leq == other.leq
                and self.boxes == other.boxes
                and self.diamonds == other.diamonds
                and self.valuation == other.valuation
                and self.flavor == other.flavor)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"Model({len(self.states)} states, {len(self.boxes)} boxes, "
                f"{len(self.diamonds)} diamonds, flavor={self.flavor!r})")

    def validate(self) -> ValidationReport:
        if self._validation is None:
            self._validation = _validate(self)
        return self._validation


class Partition:
    """Assignment of every state to a named block."""

    def __init__(self, block_of: Mapping[str, str]):
        self.block_of: dict[str, str] = dict(sorted(block_of.items()))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[str]]) -> "Partition":
        """Name each block by its least member.  Overlapping blocks are
        rejected."""
        assignment: dict[str, str] = {}
        for block in blocks:
            block = sorted(block)
            if not block:
                raise ModelFormatError("empty partition block")
            name = block[0]
            for s in block:
                if s in assignment:
                    raise ModelFormatError(f"state {s!r} is in two blocks")
                assignment[s] = name
        return cls(assignment)

    def blocks(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {}
        for state, name in self.block_of.items():
            out.setdefault(name, set()).add(state)
        return {name: frozenset(members) for name, members in sorted(out.items())}

    def covers(self, states: Iterable[str]) -> bool:
        return set(self.block_of) == set(states)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.block_of == other.block_of

    __hash__ = None

    def __repr__(self) -> str:
        return f"Partition({len(self.blocks())} blocks)"


# ---------------------------------------------------------------------------
# Validation


def _inclusion_witness(parts: Sequence[frozenset], target: frozenset):
    """First composition path through `parts` whose endpoints are not
    in `target`, or None.  The path includes every intermediate state,
    so a two-relation condition yields (x, u, y)."""
    paths: list[tuple[str, ...]] = [pair for pair in sorted(parts[0])]
    for part in parts[1:]:
        succ = rel.successors(part)
        paths = [path + (c,)
                 for path in paths
                 for c in sorted(succ.get(path[-1], ()))]
    for path in paths:
        if (path[0], path[-1]) not in target:
            return path
    return None


def _coherence_violations(m: Model) -> list[Violation]:
    leq, geq = m.leq, m.geq
    out: list[Violation] = []

    def need(axiom, parts, target):
        w = _inclusion_witness(parts, target)
        if w is not None:
            out.append(Violation(axiom, w))

    if m.flavor == STANDARD:
        for i, r in enumerate(m.boxes, 1):
            need(f"box-{i}-coherence", [leq, r], rel.compose(r, leq))
        for j, s in enumerate(m.diamonds, 1):
            need(f"diamond-{j}-coherence", [geq, s], rel.compose(s, geq))
    elif m.flavor == FS:
        r = m.boxes[0]
        need("fs-forward-coherence", [r, leq], rel.compose(leq, r))
        need("fs-backward-coherence", [geq, r], rel.compose(r, geq))
    elif m.flavor == GPT:
        r, s = m.boxes[0], m.diamonds[0]
        need("gpt-box-coherence", [r, leq], rel.compose(leq, r))
        need("gpt-diamond-coherence", [geq, s], rel.compose(s, geq))
    elif m.flavor == TENSE:
        r, s = m.boxes[0], m.diamonds[0]
        need("tense-box-equality", [leq, r], rel.compose(r, leq))
        need("tense-box-equality", [r, leq], rel.compose(leq, r))
        need("tense-diamond-equality", [geq, s], rel.compose(s, geq))
        need("tense-diamond-equality", [s, geq], rel.compose(geq, s))
    elif m.flavor == H:
        need("h-condensation", [leq, m.boxes[0], leq], m.boxes[0])
    elif m.flavor == EK:
        for i, r in enumerate(m.boxes, 1):
            need(f"ek-box-{i}-absorption", [leq, r], r)
    return out


def _is_strictly_condensed(m: Model) -> bool:
    leq, geq = m.leq, m.geq
    if m.flavor == FS:
        return rel.compose(leq, m.boxes[0]) <= m.boxes[0]
    if m.flavor == GPT:
        r, s = m.boxes[0], m.diamonds[0]
        return (rel.compose(leq, r) <= r) and (rel.compose(s, geq) <= s)
    boxes_ok = all(rel.compose_all(leq, r, leq) <= r for r in m.boxes)
    diamonds_ok = all(rel.compose_all(geq, s, geq) <= s for s in m.diamonds)
    return boxes_ok and diamonds_ok


def _validate(m: Model) -> ValidationReport:
    violations: list[Violation] = []
    for s in m.states:
        if (s, s) not in m.leq:
            violations.append(Violation("reflexivity", (s,)))
    w = rel.missing_transitivity(m.leq)
    if w is not None:
        # recover the middle state for the report
        x, z = w
        mid = min(u for u in m.up_map.get(x, m.states)
                  if (x, u) in m.leq and (u, z) in m.leq)
        violations.append(Violation("transitivity", (x, mid, z)))
    for atom, xs in m.valuation.items():
        done = False
        for a in sorted(xs):
            if done:
                break
            for b in sorted(m.up_map.get(a, ())):
                if b not in xs:
                    violations.append(Violation("valuation-upset", (atom, a, b)))
                    done = True
                    break
    violations.extend(_coherence_violations(m))
    return ValidationReport(tuple(violations), _is_strictly_condensed(m))


def validate(m: Model) -> ValidationReport:
    """Check preorder axioms, upset valuations and the flavor's
    coherence conditions.  Violations are data, not exceptions."""
    return m.validate()


def require_valid(m: Model, context: str) -> None:
    report = m.validate()
    if not report.ok:
        raise PreconditionError(
            f"{context} needs a valid model; first violation: "
            f"{report.violations[0]}")


# ---------------------------------------------------------------------------
# Model surgery


def dualize(m: Model) -> Model:
    """Mirror a model across the order: reverse ≤, complement the
    valuation, and let boxes and diamonds trade places.  An involution.

    Defined for standard models and, by swapping the two stored
    relations, for tense models.  The other flavors have no matching
    dual discipline and are rejected.
    """
    require_valid(m, "dualize")
    co_val = {atom: m.state_set - xs for atom, xs in m.valuation.items()}
    if m.flavor == STANDARD:
        return Model(m.states, m.geq, boxes=m.diamonds, diamonds=m.boxes,
                     valuation=co_val, flavor=STANDARD)
    if m.flavor == TENSE:
        return Model(m.states, m.geq, boxes=[m.diamonds[0]],
                     diamonds=[m.boxes[0]], valuation=co_val, flavor=TENSE)
    raise FlavorError(f"flavor {m.flavor!r} has no dual")


def strictify(m: Model) -> Model:
    """Absorb the order into the modal relations without changing any
    truth set.  The result is strictly condensed.

    Standard and tense models compose on the outside (R∘≤, S∘≥); GPT
    models compose the box side on the inside (≤∘R) to match how their
    box already quantifies through ≤.
    """
    require_valid(m, "strictify")
    leq, geq = m.leq, m.geq
    if m.flavor in (STANDARD, TENSE):
        boxes = [rel.compose(r, leq) for r in m.boxes]
        diamonds = [rel.compose(s, geq) for s in m.diamonds]
    elif m.flavor == GPT:
        boxes = [rel.compose(leq, m.boxes[0])]
        diamonds = [rel.compose(m.diamonds[0], geq)]
    else:
        raise FlavorError(f"flavor {m.flavor!r} has no strictification recipe")
    return Model(m.states, m.leq, boxes=boxes, diamonds=diamonds,
                 valuation=m.valuation, flavor=m.flavor)


def quotient(m: Model, p: Partition, conditions=None):
    """Collapse each partition block to one state, lifting relations
    existentially and naming blocks by their least member (so taking
    the quotient twice changes nothing, not even names).

    When a ConditionSet is supplied, the graph of the quotient map is
    checked to be a bisimulation between the model and its quotient;
    partitions that are not bisimulation-closed are rejected.

    Returns the quotient model and the state → block mapping.
    """
    if not p.covers(m.states):
        raise PreconditionError(
            "partition does not cover exactly the model's states")
    blk = p.block_of

    def lift(pairs):
        return frozenset((blk[a], blk[b]) for a, b in pairs)

    lifted = Model(
        sorted(set(blk.values())),
        lift(m.leq),
        boxes=[lift(r) for r in m.boxes],
        diamonds=[lift(s) for s in m.diamonds],
        valuation={atom: {blk[x] for x in xs}
                   for atom, xs in m.valuation.items()},
        flavor=m.flavor,
    )
    if conditions is not None:
        from .bisim import is_bisimulation
        graph = frozenset((x, blk[x]) for x in m.states)
        bad = is_bisimulation(graph, m, lifted, conditions)
        if bad:
            raise PreconditionError(
                "partition is not bisimulation-closed: "
                f"{bad[0]}")
    return lifted, dict(blk)


def enrich_valuation(m: Model, defs: Sequence[tuple[str, object]]) -> Model:
    """Extend the valuation with fresh atoms denoting formula truth
    sets: each (name, formula) pair adds V(name) = eval(formula)."""
    from .semantics import truth_set
    val = dict(m.valuation)
    for atom, formula in defs:
        if atom in val:
            raise ModelFormatError(f"atom {atom!r} already has a valuation")
        val[atom] = truth_set(formula, m)
    return Model(m.states, m.leq, boxes=m.boxes, diamonds=m.diamonds,
                 valuation=val, flavor=m.flavor)


# ---------------------------------------------------------------------------
# Example gallery


def build_example(name: str, params: Sequence[int] = ()) -> Model:
    """Small named models used throughout the documentation and tests.

    wedge               three states; R reaches only the bottom of a
                        two-point chain, so it is valid but not
                        strictly condensed
    wedge_strict        the same carrier with the strictified relation
    spines k            a root with paths of lengths 1..k hanging off
                        it, trivial order, no atoms
    porcupine n         increasing chains of lengths 1..n+1 below a
                        top point x; atoms p0..pn mark chain height, q
                        marks x
    porcupine_trimmed n like porcupine but with chains 1..n only
    omega_chain n       the chain 0 ≤ 1 ≤ ... ≤ n ≤ inf with
                        p_i = {states from i up}
    """
    if name in ("wedge", "wedge_strict"):
        if params:
            raise ModelFormatError(f"{name} takes no parameter")
        r = {("x", "y"), ("x", "z")} if name == "wedge_strict" else {("x", "y")}
        return Model.make(
            ["x", "y", "z"], [("y", "z")], boxes=[r],
            valuation={"p": {"y", "z"}, "q": {"z"}})
    if name in ("spines", "porcupine", "porcupine_trimmed", "omega_chain"):
        if len(params) != 1:
            raise ModelFormatError(f"{name} takes exactly one parameter")
        k = params[0]
        if k < 1:
            raise ModelFormatError(f"{name} needs a positive parameter")
    if name == "spines":
        states = ["r"]
        edges = []
        for j in range(1, k + 1):
            prev = "r"
            for i in range(1, j + 1):
                s = f"s{j}_{i}"
                states.append(s)
                edges.append((prev, s))
                prev = s
        return Model.make(states, [], boxes=[edges], valuation={})
    if name in ("porcupine", "porcupine_trimmed"):
        top = k + 1 if name == "porcupine" else k
        states = ["x"]
        order = []
        heights: dict[str, int] = {}
        for n in range(1, top + 1):
            chain = [f"b{n}k{i}" for i in range(n)]
            states.extend(chain)
            for a, b in zip(chain, chain[1:]):
                order.append((a, b))
            order.append((chain[-1], "x"))
            for i, s in enumerate(chain):
                heights[s] = i
        valuation: dict[str, set[str]] = {"q": {"x"}}
        for i in range(k + 1):
            valuation[f"p{i}"] = {s for s, h in heights.items() if i <= h} | {"x"}
        return Model.make(states, order, valuation=valuation)
    if name == "omega_chain":
        states = [str(i) for i in range(k + 1)] + ["inf"]
        order = [(str(i), str(i + 1)) for i in range(k)] + [(str(k), "inf")]
        valuation = {
            f"p{i}": {str(j) for j in range(i, k + 1)} | {"inf"}
            for i in range(k + 1)
        }
        return Model.make(states, order, valuation=valuation)
    raise ModelFormatError(f"unknown example {name!r}")


# ---------------------------------------------------------------------------
# JSON format


_MODEL_KEYS = {"states", "leq_gen", "boxes", "diamonds", "valuation", "flavor"}


def _pairs(value, what):
    if not isinstance(value, list):
        raise ModelFormatError(f"{what} must be a list of pairs")
    out = []
    for item in value:
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(s, str) for s in item)):
            raise ModelFormatError(f"{what} must contain [from, to] pairs")
        out.append((item[0], item[1]))
    return out


def model_from_dict(data) -> Model:
    """Strictly parse the JSON model object.  The order is given by
    generators under "leq_gen" and closed into a preorder here."""
    if not isinstance(data, dict):
        raise ModelFormatError("model file must hold a JSON object")
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ModelFormatError(f"unknown model key {sorted(unknown)[0]!r}")
    for key in ("states", "leq_gen", "valuation"):
        if key not in data:
            raise ModelFormatError(f"model is missing {key!r}")
    states = data["states"]
    if (not isinstance(states, list)
            or not all(isinstance(s, str) for s in states)):
        raise ModelFormatError("states must be a list of strings")
    leq_gen = _pairs(data["leq_gen"], "leq_gen")
    rels = {}
    for key in ("boxes", "diamonds"):
        value = data.get(key, [])
        if not isinstance(value, list):
            raise ModelFormatError(f"{key} must be a list of relations")
        rels[key] = [_pairs(r, f"{key}[{i}]") for i, r in enumerate(value)]
    valuation = data["valuation"]
    if not isinstance(valuation, dict):
        raise ModelFormatError("valuation must be an object")
    for atom, xs in valuation.items():
        if not isinstance(xs, list) or not all(isinstance(s, str) for s in xs):
            raise ModelFormatError(f"valuation of {atom!r} must list states")
    flavor = data.get("flavor", STANDARD)
    if not isinstance(flavor, str):
        raise ModelFormatError("flavor must be a string")
    return Model.make(states, leq_gen, boxes=rels["boxes"],
                      diamonds=rels["diamonds"], valuation=valuation,
                      flavor=flavor)


def model_to_dict(m: Model) -> dict:
    return {
        "states": list(m.states),
        "leq_gen": [list(p) for p in sorted(m.leq)],
        "boxes": [[list(p) for p in sorted(r)] for r in m.boxes],
        "diamonds": [[list(p) for p in sorted(s)] for s in m.diamonds],
        "valuation": {atom: sorted(xs) for atom, xs in m.valuation.items()},
        "flavor": m.flavor,
    }


def load_model(path: str) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(data)


def model_to_json(m: Model) -> str:
    return json.dumps(model_to_dict(m), indent=2, sort_keys=True) + "\n"
