"""Formula AST, concrete syntax, fragment classification and complexity measures.

The stored AST uses only the core connectives (atoms, ~, &, K, intervention
boxes, announcement boxes).  Disjunction, implication and biconditional exist
as builders/parser sugar and are desugared immediately:

    a | b | c   ==>  ~(~a & ~b & ~c)        (conjunction chain left-assoc)
    a -> b      ==>  ~(a & ~b)
    iff(a, b)   ==>  (a -> b) & (b -> a)

Grammar (whitespace insignificant)::

    formula := impl
    impl    := disj ("->" impl)?
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "~" unary | "K" unary | box unary | atom | "(" formula ")"
    box     := "[" assigns "]" | "[" formula "!" "]"
    assigns := (IDENT "=" IDENT ("," IDENT "=" IDENT)*)?
    atom    := IDENT "=" IDENT

IDENT is ``[A-Za-z_][A-Za-z0-9_]*`` or a bare number such as ``0``/``1``
(value names are arbitrary tokens, so numeric names must lex).  A ``K``
followed by ``=`` is an atom whose variable is named K, otherwise it is the
knowledge operator.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional

from .errors import BindingError, FormulaSyntaxError, FragmentError


# ---------------------------------------------------------------------------
# assignments


@dataclass(frozen=True, slots=True)
class Assignment:
    """A duplicate-free list of (variable, value) pairs; may be empty."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen = set()
        for var, _ in self.pairs:
            if var in seen:
                raise ValueError(f"duplicate variable {var!r} in assignment")
            seen.add(var)

    @staticmethod
    def of(mapping_or_pairs) -> "Assignment":
        if isinstance(mapping_or_pairs, Assignment):
            return mapping_or_pairs
        if isinstance(mapping_or_pairs, dict):
            return Assignment(tuple((str(k), str(v)) for k, v in mapping_or_pairs.items()))
        return Assignment(tuple((str(k), str(v)) for k, v in mapping_or_pairs))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(var for var, _ in self.pairs)

    def value_of(self, var: str) -> Optional[str]:
        for v, x in self.pairs:
            if v == var:
                return x
        return None

    def to_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def is_empty(self) -> bool:
        return not self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        return ", ".join(f"{v}={x}" for v, x in self.pairs)


EMPTY_ASSIGNMENT = Assignment(())


# ---------------------------------------------------------------------------
# formula nodes


class Formula:
    """Marker base class; concrete nodes are the frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    variable: str
    value: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Know(Formula):
    sub: Formula

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Intervene(Formula):
    assignment: Assignment
    sub: Formula

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Announce(Formula):
    alpha: Formula
    sub: Formula

    def __str__(self) -> str:
        return to_text(self)


# ---------------------------------------------------------------------------
# derived-connective builders and recognizers


def and_list(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        raise ValueError("empty conjunction has no core representation")
    return reduce(And, items)


def or_list(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        raise ValueError("empty disjunction has no core representation")
    if len(items) == 1:
        return items[0]
    return Not(and_list([Not(i) for i in items]))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def as_implies(f: Formula) -> Optional[tuple[Formula, Formula]]:
    if isinstance(f, Not) and isinstance(f.sub, And) and isinstance(f.sub.right, Not):
        return f.sub.left, f.sub.right.sub
    return None


def as_iff(f: Formula) -> Optional[tuple[Formula, Formula]]:
    if not isinstance(f, And):
        return None
    fwd = as_implies(f.left)
    bwd = as_implies(f.right)
    if fwd and bwd and fwd == (bwd[1], bwd[0]):
        return fwd
    return None


def flatten_and(f: Formula) -> list[Formula]:
    """Operands of a left-associated conjunction chain (length 1 if not an And)."""
    parts: list[Formula] = []
    while isinstance(f, And):
        parts.append(f.right)
        f = f.left
    parts.append(f)
    parts.reverse()
    return parts


def split_or(f: Formula) -> Optional[list[Formula]]:
    """Inverse of or_list for >= 2 disjuncts; None if f is not of that shape."""
    if isinstance(f, Not) and isinstance(f.sub, And):
        parts = flatten_and(f.sub)
        if all(isinstance(p, Not) for p in parts):
            return [p.sub for p in parts]
    return None


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Not, Know, Intervene)):
            stack.append(g.sub)
        elif isinstance(g, And):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Announce):
            stack.append(g.alpha)
            stack.append(g.sub)
    return out


def count_nodes(f: Formula) -> int:
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Not, Know)):
        return 1 + count_nodes(f.sub)
    if isinstance(f, And):
        return 1 + count_nodes(f.left) + count_nodes(f.right)
    if isinstance(f, Intervene):
        return 1 + len(f.assignment) + count_nodes(f.sub)
    if isinstance(f, Announce):
        return 1 + count_nodes(f.alpha) + count_nodes(f.sub)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# printer


def _pairs_text(asg: Assignment) -> str:
    return ", ".join(f"{v}={x}" for v, x in asg.pairs)


def _unary_text(f: Formula) -> str:
    if isinstance(f, And):
        return f"({to_text(f)})"
    return to_text(f)


def to_text(f: Formula) -> str:
    """Canonical concrete syntax; round-trips through the parser."""
    if isinstance(f, Atom):
        return f"{f.variable}={f.value}"
    if isinstance(f, Not):
        return f"~{_unary_text(f.sub)}"
    if isinstance(f, And):
        return " & ".join(_unary_text(p) for p in flatten_and(f))
    if isinstance(f, Know):
        return f"K {_unary_text(f.sub)}"
    if isinstance(f, Intervene):
        return f"[{_pairs_text(f.assignment)}] {_unary_text(f.sub)}"
    if isinstance(f, Announce):
        return f"[{to_text(f.alpha)} !] {_unary_text(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


print_formula = to_text


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)|(?P<arrow>->)|(?P<sym>[~&|=,\[\]()!]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                if text[pos:].strip() == "":
                    break
                bad = len(text) - len(text[pos:].lstrip())
                raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
            if m.group("name") is not None:
                self.tokens.append(("NAME", m.group("name"), m.start("name")))
            elif m.group("arrow") is not None:
                self.tokens.append(("->", "->", m.start("arrow")))
            else:
                sym = m.group("sym")
                self.tokens.append((sym, sym, m.start("sym")))
            pos = m.end()
        self.i = 0

    def _peek(self, offset: int = 0) -> Optional[tuple[str, str, int]]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def _pos(self) -> int:
        tok = self._peek()
        return tok[2] if tok else len(self.text)

    def _expect(self, kind: str) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None or tok[0] != kind:
            found = tok[1] if tok else "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {found!r}", self._pos())
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.impl()
        if self._peek() is not None:
            raise FormulaSyntaxError(f"unexpected token {self._peek()[1]!r}", self._pos())
        return f

    def impl(self) -> Formula:
        left = self.disj()
        if self._peek() and self._peek()[0] == "->":
            self.i += 1
            return implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self._peek() and self._peek()[0] == "|":
            self.i += 1
            parts.append(self.conj())
        return or_list(parts)

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self._peek() and self._peek()[0] == "&":
            self.i += 1
            parts.append(self.unary())
        return and_list(parts)

    def unary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self._pos())
        kind, value, pos = tok
        if kind == "~":
            self.i += 1
            return Not(self.unary())
        if kind == "(":
            self.i += 1
            f = self.impl()
            self._expect(")")
            return f
        if kind == "[":
            return self.box()
        if kind == "NAME":
            nxt = self._peek(1)
            if nxt and nxt[0] == "=":
                return self.atom()
            if value == "K":
                self.i += 1
                return Know(self.unary())
            raise FormulaSyntaxError(f"expected '=' after variable {value!r}", pos)
        raise FormulaSyntaxError(f"unexpected token {value!r}", pos)

    def atom(self) -> Atom:
        var = self._expect("NAME")[1]
        self._expect("=")
        val = self._expect("NAME")[1]
        return Atom(var, val)

    def box(self) -> Formula:
        open_pos = self._expect("[")[2]
        asg = self._try_assigns(open_pos)
        if asg is not None:
            return Intervene(asg, self.unary())
        alpha = self.impl()
        self._expect("!")
        self._expect("]")
        return Announce(alpha, self.unary())

    def _try_assigns(self, open_pos: int) -> Optional[Assignment]:
        """Probe for an intervention box; rewinds and returns None otherwise."""
        save = self.i
        tok = self._peek()
        if tok and tok[0] == "]":
            self.i += 1
            return EMPTY_ASSIGNMENT
        pairs: list[tuple[str, str]] = []
        while True:
            tok = self._peek()
            if tok is None or tok[0] != "NAME" or not (
                self._peek(1) and self._peek(1)[0] == "="
            ):
                self.i = save
                return None
            var = tok[1]
            self.i += 2
            vtok = self._peek()
            if vtok is None or vtok[0] != "NAME":
                self.i = save
                return None
            pairs.append((var, vtok[1]))
            self.i += 1
            tok = self._peek()
            if tok and tok[0] == ",":
                self.i += 1
                continue
            if tok and tok[0] == "]":
                self.i += 1
                seen = set()
                for v, _ in pairs:
                    if v in seen:
                        raise FormulaSyntaxError(
                            f"duplicate variable {v!r} in intervention", open_pos
                        )
                    seen.add(v)
                return Assignment(tuple(pairs))
            self.i = save
            return None


def parse_unbound(text: str) -> Formula:
    """Parse without checking names against a signature."""
    return _Parser(text).parse()


def parse(text: str, signature) -> Formula:
    """Parse and bind against a signature (validates names, canonicalizes)."""
    return bind(parse_unbound(text), signature)


# ---------------------------------------------------------------------------
# binding


def _bind_pair(var: str, value: str, signature) -> None:
    if var not in signature.positions:
        raise BindingError(f"unknown variable {var!r}")
    if value not in signature.ranges[var]:
        raise BindingError(
            f"value {value!r} not in the range of {var!r} {list(signature.ranges[var])}"
        )


def bind(f: Formula, signature) -> Formula:
    """Validate variable/value names and sort assignments canonically."""
    if isinstance(f, Atom):
        _bind_pair(f.variable, f.value, signature)
        return f
    if isinstance(f, Not):
        return Not(bind(f.sub, signature))
    if isinstance(f, And):
        return And(bind(f.left, signature), bind(f.right, signature))
    if isinstance(f, Know):
        return Know(bind(f.sub, signature))
    if isinstance(f, Intervene):
        for var, value in f.assignment.pairs:
            _bind_pair(var, value, signature)
        return Intervene(signature.sort_assignment(f.assignment), bind(f.sub, signature))
    if isinstance(f, Announce):
        return Announce(bind(f.alpha, signature), bind(f.sub, signature))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# fragments


class FragmentTag(enum.Enum):
    LC = "LC"
    LCp = "LCp"
    LKC = "LKC"
    LKCp = "LKCp"
    LPAKC = "LPAKC"
    LPAKCp = "LPAKCp"


def is_primed_atom(f: Formula) -> bool:
    """An intervention box with an atomic consequent."""
    return isinstance(f, Intervene) and isinstance(f.sub, Atom)


def _in_lc(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return _in_lc(f.sub)
    if isinstance(f, And):
        return _in_lc(f.left) and _in_lc(f.right)
    if isinstance(f, Intervene):
        return _in_lc(f.sub)
    return False


def _in_lkc(f: Formula) -> bool:
    if isinstance(f, Know):
        return _in_lkc(f.sub)
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return _in_lkc(f.sub)
    if isinstance(f, And):
        return _in_lkc(f.left) and _in_lkc(f.right)
    if isinstance(f, Intervene):
        return _in_lkc(f.sub)
    return False


def _in_primed(f: Formula, know: bool, announce: bool) -> bool:
    if is_primed_atom(f):
        return True
    if isinstance(f, Not):
        return _in_primed(f.sub, know, announce)
    if isinstance(f, And):
        return _in_primed(f.left, know, announce) and _in_primed(f.right, know, announce)
    if know and isinstance(f, Know):
        return _in_primed(f.sub, know, announce)
    if announce and isinstance(f, Announce):
        return _in_primed(f.alpha, know, announce) and _in_primed(f.sub, know, announce)
    return False


def fragment(f: Formula) -> frozenset[FragmentTag]:
    """Every fragment tag whose grammar generates f."""
    tags = {FragmentTag.LPAKC}
    if _in_lkc(f):
        tags.add(FragmentTag.LKC)
    if _in_lc(f):
        tags.add(FragmentTag.LC)
    if _in_primed(f, know=True, announce=True):
        tags.add(FragmentTag.LPAKCp)
    if _in_primed(f, know=True, announce=False):
        tags.add(FragmentTag.LKCp)
    if _in_primed(f, know=False, announce=False):
        tags.add(FragmentTag.LCp)
    return frozenset(tags)


# ---------------------------------------------------------------------------
# complexity measures


class Measure(enum.Enum):
    C = "C"
    KC = "KC"
    PAKC = "PAKC"
    PAKCp = "PAKCp"


def complexity(f: Formula, measure: Measure) -> int:
    """Translation-termination weight of f under the given measure.

    Atoms weigh 1 (under PAKCp the unit is a boxed atom instead), negation
    and K add 1, conjunction is 1 + max, an intervention doubles, and an
    announcement multiplies by 7 + the weight of the announced formula.
    """
    if measure is Measure.PAKCp:
        if is_primed_atom(f):
            return 1
        if isinstance(f, (Atom, Intervene)):
            raise FragmentError(f"measure PAKCp undefined for {to_text(f)!r}")
    if isinstance(f, Atom):
        return 1
    if isinstance(f, Not):
        return 1 + complexity(f.sub, measure)
    if isinstance(f, And):
        return 1 + max(complexity(f.left, measure), complexity(f.right, measure))
    if isinstance(f, Know):
        if measure is Measure.C:
            raise FragmentError("measure C undefined for K")
        return 1 + complexity(f.sub, measure)
    if isinstance(f, Intervene):
        return 2 * complexity(f.sub, measure)
    if isinstance(f, Announce):
        if measure in (Measure.C, Measure.KC):
            raise FragmentError(f"measure {measure.value} undefined for announcements")
        return (7 + complexity(f.alpha, measure)) * complexity(f.sub, measure)
    raise TypeError(f"not a formula: {f!r}")
