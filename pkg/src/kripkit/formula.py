"""Formula syntax for intuitionistic and bi-intuitionistic modal languages.

Concrete syntax, binding tightest first:

    T  F              constants
    p  q3  my_atom    atoms (lowercase identifiers)
    ~a    -.a         negations, shorthand for a -> F and T -< a
    []1 a   <>2 a     forward box / diamond along an indexed relation
    <|1 a   |>2 a     backward diamond / box along the same relations
    C a               box along the shared closure of all box relations
    a & b             conjunction, left associative
    a | b             disjunction, left associative
    a -> b            implication, right associative
    a -< b            subtraction (co-implication), left associative

The two arrows bind equally weakly; a chain that mixes them without
parentheses is rejected instead of silently picking a reading.
`parse` and `to_string` round-trip: printing inserts exactly the
parentheses needed to reparse to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FragmentError, ParseError


def _check_index(index: int) -> None:
    if not isinstance(index, int) or index < 1:
        raise ValueError(f"relation index must be a positive integer, "
                         f"got {index!r}")


class Formula:
    """Base class for formula nodes.  Instances are immutable and
    compare structurally."""

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Sub(Formula):
    """Subtraction a -< b: the co-implication dual to ->."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)


@dataclass(frozen=True)
class Dia(Formula):
    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)


@dataclass(frozen=True)
class TDia(Formula):
    """Backward diamond <|i: looks against box relation i."""

    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)


@dataclass(frozen=True)
class TBox(Formula):
    """Backward box |>j: looks against diamond relation j."""

    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)


@dataclass(frozen=True)
class Ck(Formula):
    """Common knowledge: box along the transitive closure of the union
    of all box relations."""

    body: Formula


# ---------------------------------------------------------------------------
# Tokenizer

_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")

# (kind, value, position) triples
_Token = tuple[str, object, int]


def _read_index(text: str, start: int, op_end: int) -> tuple[int, int]:
    m = _INT_RE.match(text, op_end)
    if not m:
        raise ParseError("expected a relation index after modal operator", op_end)
    index = int(m.group())
    if index < 1:
        raise ParseError("relation index must be at least 1", op_end)
    return index, m.end()


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "(":
            tokens.append(("LPAREN", None, i))
            i += 1
        elif c == ")":
            tokens.append(("RPAREN", None, i))
            i += 1
        elif c == "&":
            tokens.append(("AND", None, i))
            i += 1
        elif c == "|":
            if text.startswith("|>", i):
                index, i2 = _read_index(text, i, i + 2)
                tokens.append(("TBOX", index, i))
                i = i2
            else:
                tokens.append(("OR", None, i))
                i += 1
        elif c == "-":
            nxt = text[i + 1 : i + 2]
            if nxt == ">":
                tokens.append(("IMP", None, i))
                i += 2
            elif nxt == "<":
                tokens.append(("SUB", None, i))
                i += 2
            elif nxt == ".":
                tokens.append(("CONEG", None, i))
                i += 2
            else:
                raise ParseError("lone '-': expected ->, -< or -.", i)
        elif c == "~":
            tokens.append(("NEG", None, i))
            i += 1
        elif c == "[":
            if not text.startswith("[]", i):
                raise ParseError("'[' must start a box operator []", i)
            index, i2 = _read_index(text, i, i + 2)
            tokens.append(("BOX", index, i))
            i = i2
        elif c == "<":
            if text.startswith("<>", i):
                index, i2 = _read_index(text, i, i + 2)
                tokens.append(("DIA", index, i))
                i = i2
            elif text.startswith("<|", i):
                index, i2 = _read_index(text, i, i + 2)
                tokens.append(("TDIA", index, i))
                i = i2
            else:
                raise ParseError("'<' must start <> or <|", i)
        elif c == "T":
            tokens.append(("TOP", None, i))
            i += 1
        elif c == "F":
            tokens.append(("BOT", None, i))
            i += 1
        elif c == "C":
            tokens.append(("CK", None, i))
            i += 1
        else:
            m = _ATOM_RE.match(text, i)
            if not m:
                raise ParseError(f"unexpected character {c!r}", i)
            tokens.append(("ATOM", m.group(), i))
            i = m.end()
    return tokens


# ---------------------------------------------------------------------------
# Parser: recursive descent, one level per precedence tier.


class _Parser:
    def __init__(self, tokens: list[_Token], length: int):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def formula(self) -> Formula:
        return self.arrows()

    def arrows(self) -> Formula:
        items = [self.disjunction()]
        kinds: list[tuple[str, int]] = []
        while (tok := self.peek()) is not None and tok[0] in ("IMP", "SUB"):
            self.pos += 1
            kinds.append((tok[0], tok[2]))
            items.append(self.disjunction())
        if not kinds:
            return items[0]
        for kind, at in kinds:
            if kind != kinds[0][0]:
                raise ParseError("mixing -> and -< needs parentheses", at)
        if kinds[0][0] == "IMP":
            acc = items[-1]
            for item in reversed(items[:-1]):
                acc = Imp(item, acc)
            return acc
        acc = items[0]
        for item in items[1:]:
            acc = Sub(acc, item)
        return acc

    def disjunction(self) -> Formula:
        acc = self.conjunction()
        while (tok := self.peek()) is not None and tok[0] == "OR":
            self.pos += 1
            acc = Or(acc, self.conjunction())
        return acc

    def conjunction(self) -> Formula:
        acc = self.unary()
        while (tok := self.peek()) is not None and tok[0] == "AND":
            self.pos += 1
            acc = And(acc, self.unary())
        return acc

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.length)
        kind, value, at = tok
        if kind == "BOX":
            self.pos += 1
            return Box(value, self.unary())
        if kind == "DIA":
            self.pos += 1
            return Dia(value, self.unary())
        if kind == "TDIA":
            self.pos += 1
            return TDia(value, self.unary())
        if kind == "TBOX":
            self.pos += 1
            return TBox(value, self.unary())
        if kind == "NEG":
            self.pos += 1
            return Imp(self.unary(), Bot())
        if kind == "CONEG":
            self.pos += 1
            return Sub(Top(), self.unary())
        if kind == "CK":
            self.pos += 1
            return Ck(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.length)
        kind, value, at = tok
        if kind == "ATOM":
            self.pos += 1
            return Atom(value)
        if kind == "TOP":
            self.pos += 1
            return Top()
        if kind == "BOT":
            self.pos += 1
            return Bot()
        if kind == "LPAREN":
            self.pos += 1
            inner = self.arrows()
            closing = self.peek()
            if closing is None or closing[0] != "RPAREN":
                raise ParseError("expected ')'",
                                 self.length if closing is None else closing[2])
            self.pos += 1
            return inner
        raise ParseError("expected a formula here", at)


def parse(text: str) -> Formula:
    """Parse concrete syntax into a formula tree.

    :raises ParseError: on malformed input, with the offending offset.
    """
    parser = _Parser(_tokenize(text), len(text))
    result = parser.formula()
    if (tok := parser.peek()) is not None:
        raise ParseError("unexpected trailing input", tok[2])
    return result


# ---------------------------------------------------------------------------
# Printing

_PRECEDENCE = {And: 3, Or: 2, Imp: 1, Sub: 1}

_MODAL_SYMBOL = {Box: "[]", Dia: "<>", TDia: "<|", TBox: "|>"}


def to_string(f: Formula) -> str:
    """Render with the minimal parenthesization that reparses to f."""
    return _render(f, 0, None)


def _render(f: Formula, floor: int, arrow_ctx: type | None) -> str:
    prec = _PRECEDENCE.get(type(f), 4)
    if isinstance(f, Atom):
        out = f.name
    elif isinstance(f, Top):
        out = "T"
    elif isinstance(f, Bot):
        out = "F"
    elif isinstance(f, And):
        out = f"{_render(f.left, 3, None)} & {_render(f.right, 4, None)}"
    elif isinstance(f, Or):
        out = f"{_render(f.left, 2, None)} | {_render(f.right, 3, None)}"
    elif isinstance(f, Imp):
        out = f"{_render(f.left, 2, None)} -> {_render(f.right, 1, Imp)}"
    elif isinstance(f, Sub):
        out = f"{_render(f.left, 1, Sub)} -< {_render(f.right, 2, None)}"
    elif isinstance(f, (Box, Dia, TDia, TBox)):
        out = f"{_MODAL_SYMBOL[type(f)]}{f.index} {_render(f.body, 4, None)}"
    elif isinstance(f, Ck):
        out = f"C {_render(f.body, 4, None)}"
    else:
        raise TypeError(f"not a formula node: {f!r}")
    # Parenthesize when binding too loosely for the context, and when
    # sitting in an arrow chain of the other arrow (the parser refuses
    # mixed chains).
    if prec < floor or (prec == 1 and floor == 1 and type(f) is not arrow_ctx):
        return f"({out})"
    return out


# ---------------------------------------------------------------------------
# Structural measures and fragments


def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, (And, Or, Imp, Sub)):
        return atoms_of(f.left) | atoms_of(f.right)
    return atoms_of(f.body)


def connective_count(f: Formula) -> int:
    """Number of connective nodes; atoms and constants count zero."""
    if isinstance(f, (Atom, Top, Bot)):
        return 0
    if isinstance(f, (And, Or, Imp, Sub)):
        return 1 + connective_count(f.left) + connective_count(f.right)
    return 1 + connective_count(f.body)


def nesting_depth(f: Formula) -> int:
    """Alternation-aware nesting depth.

    Arrows and modal operators each open a layer, except that a modal
    operator applied directly to an arrow shares the arrow's layer:
    []1 (p -> q) is one layer deep, matching how one refinement round
    of the bisimulation game can introduce exactly that shape.
    Conjunction and disjunction are free.
    """
    if isinstance(f, (Atom, Top, Bot)):
        return 0
    if isinstance(f, (And, Or)):
        return max(nesting_depth(f.left), nesting_depth(f.right))
    if isinstance(f, (Imp, Sub)):
        return 1 + max(nesting_depth(f.left), nesting_depth(f.right))
    body = f.body
    if isinstance(body, (Imp, Sub)):
        return 1 + max(nesting_depth(body.left), nesting_depth(body.right))
    return 1 + nesting_depth(body)


@dataclass(frozen=True)
class Fragment:
    """A sublanguage: which arrows are allowed, how many box and
    diamond relations exist, and whether the backward operators are in.

    base is 'int' (implication only), 'intdual' (subtraction only) or
    'biint' (both).  Backward operators require base 'biint'.
    """

    base: str = "biint"
    n_boxes: int = 0
    m_diamonds: int = 0
    tense: bool = False

    def __post_init__(self):
        if self.base not in ("int", "intdual", "biint"):
            raise FragmentError(f"unknown base {self.base!r}, "
                                "expected int, intdual or biint")
        if self.n_boxes < 0 or self.m_diamonds < 0:
            raise FragmentError("relation counts cannot be negative")
        if self.tense and self.base != "biint":
            raise FragmentError("backward operators need base 'biint'")

    def admits(self, f: Formula) -> bool:
        """Whether every connective of f lives inside this fragment.
        Common knowledge is only at home in implication-and-boxes
        fragments without backward operators."""
        if isinstance(f, (Atom, Top, Bot)):
            return True
        if isinstance(f, And) or isinstance(f, Or):
            return self.admits(f.left) and self.admits(f.right)
        if isinstance(f, Imp):
            return self.base in ("int", "biint") \
                and self.admits(f.left) and self.admits(f.right)
        if isinstance(f, Sub):
            return self.base in ("intdual", "biint") \
                and self.admits(f.left) and self.admits(f.right)
        if isinstance(f, Box):
            return 1 <= f.index <= self.n_boxes and self.admits(f.body)
        if isinstance(f, Dia):
            return 1 <= f.index <= self.m_diamonds and self.admits(f.body)
        if isinstance(f, TDia):
            return self.tense and 1 <= f.index <= self.n_boxes \
                and self.admits(f.body)
        if isinstance(f, TBox):
            return self.tense and 1 <= f.index <= self.m_diamonds \
                and self.admits(f.body)
        if isinstance(f, Ck):
            return self.base == "int" and not self.tense \
                and self.m_diamonds == 0 and self.admits(f.body)
        raise TypeError(f"not a formula node: {f!r}")


def fragment_of(f: Formula) -> Fragment:
    """Smallest fragment containing f.

    Arrow-free formulas report base 'int': nothing in them separates
    the two bases, so the positive choice is the canonical one.
    """
    has_imp = has_sub = tense = has_ck = False
    n_boxes = m_diamonds = 0

    def walk(g: Formula) -> None:
        nonlocal has_imp, has_sub, tense, n_boxes, m_diamonds, has_ck
        if isinstance(g, (Atom, Top, Bot)):
            return
        if isinstance(g, (And, Or)):
            walk(g.left), walk(g.right)
        elif isinstance(g, Imp):
            has_imp = True
            walk(g.left), walk(g.right)
        elif isinstance(g, Sub):
            has_sub = True
            walk(g.left), walk(g.right)
        elif isinstance(g, Box):
            n_boxes = max(n_boxes, g.index)
            walk(g.body)
        elif isinstance(g, Dia):
            m_diamonds = max(m_diamonds, g.index)
            walk(g.body)
        elif isinstance(g, TDia):
            tense = True
            n_boxes = max(n_boxes, g.index)
            walk(g.body)
        elif isinstance(g, TBox):
            tense = True
            m_diamonds = max(m_diamonds, g.index)
            walk(g.body)
        elif isinstance(g, Ck):
            has_imp = True
            has_ck = True
            n_boxes = max(n_boxes, 1)
            walk(g.body)
        else:
            raise TypeError(f"not a formula node: {g!r}")

    walk(f)
    if has_ck and (has_sub or tense or m_diamonds > 0):
        raise FragmentError(
            "common knowledge does not combine with subtraction, diamonds "
            "or backward operators; no fragment admits this formula")
    if tense or (has_imp and has_sub):
        base = "biint"
    elif has_sub:
        base = "intdual"
    else:
        base = "int"
    return Fragment(base, n_boxes, m_diamonds, tense)


# ---------------------------------------------------------------------------
# The dualizing translation


def translate(f: Formula) -> Formula:
    """Swap each connective with its order-dual, keeping atoms and
    relation indexes fixed.  Applying it twice gives back the input.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, Top):
        return Bot()
    if isinstance(f, Bot):
        return Top()
    if isinstance(f, And):
        return Or(translate(f.left), translate(f.right))
    if isinstance(f, Or):
        return And(translate(f.left), translate(f.right))
    if isinstance(f, Imp):
        return Sub(translate(f.right), translate(f.left))
    if isinstance(f, Sub):
        return Imp(translate(f.right), translate(f.left))
    if isinstance(f, Box):
        return Dia(f.index, translate(f.body))
    if isinstance(f, Dia):
        return Box(f.index, translate(f.body))
    if isinstance(f, TDia):
        return TBox(f.index, translate(f.body))
    if isinstance(f, TBox):
        return TDia(f.index, translate(f.body))
    if isinstance(f, Ck):
        raise FragmentError("common knowledge has no order-dual here")
    raise TypeError(f"not a formula node: {f!r}")
