"""Axiom-schema matchers, Hilbert derivation checking and soundness audits.

A schema matcher decides whether a fully concrete formula is a literal
instance of its schema, side conditions included.  Derivations are lists of
lines, each justified as a premise, an axiom instance, or an application of
an inference rule to earlier lines; checking is purely mechanical.

Formulas handed to the matchers must be bound (assignments in canonical
order); ``match_axiom`` binds defensively.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .epistemic import SemanticsMode
from .errors import DerivationError, EclogicError
from .models import Signature, direct_cause_formula
from .reductions import merge_assignments
from .syntax import (
    EMPTY_ASSIGNMENT,
    And,
    Announce,
    Assignment,
    Atom,
    Formula,
    FragmentTag,
    Intervene,
    Know,
    Not,
    and_list,
    as_iff,
    as_implies,
    bind,
    flatten_and,
    iff,
    implies,
    is_primed_atom,
    or_list,
    parse,
    split_or,
)

MAX_PROP_ATOMS = 20


# ---------------------------------------------------------------------------
# propositional tautology checking over abstracted atoms


def _abstract_atoms(f: Formula, out: list[Formula]) -> None:
    if isinstance(f, Not):
        _abstract_atoms(f.sub, out)
    elif isinstance(f, And):
        _abstract_atoms(f.left, out)
        _abstract_atoms(f.right, out)
    elif f not in out:
        out.append(f)


def _prop_eval(f: Formula, values: dict[Formula, bool]) -> bool:
    if isinstance(f, Not):
        return not _prop_eval(f.sub, values)
    if isinstance(f, And):
        return _prop_eval(f.left, values) and _prop_eval(f.right, values)
    return values[f]


def is_tautology(f: Formula) -> bool:
    """Truth-table check treating maximal non-Boolean subformulas as letters."""
    letters: list[Formula] = []
    _abstract_atoms(f, letters)
    if len(letters) > MAX_PROP_ATOMS:
        raise EclogicError(
            f"tautology check limited to {MAX_PROP_ATOMS} distinct letters, "
            f"got {len(letters)}"
        )
    for bits in itertools.product((False, True), repeat=len(letters)):
        if not _prop_eval(f, dict(zip(letters, bits))):
            return False
    return True


# ---------------------------------------------------------------------------
# instance builders (shared by matchers, audits and tests)


def _observable_tuples(signature: Signature):
    obs = signature.observables
    return [tuple(zip(obs, values))
            for values in itertools.product(*(signature.ranges[o] for o in obs))]


def constant_observables_instance(signature: Signature, asg: Assignment) -> Formula:
    """[asg] (one of the observable tuples is known to hold)."""
    if not signature.observables:
        raise EclogicError("the constant-observables schema needs observables")
    disjuncts = [
        Know(and_list([Atom(o, v) for o, v in pairs]))
        for pairs in _observable_tuples(signature)
    ]
    return Intervene(signature.sort_assignment(asg), or_list(disjuncts))


def prediction_instance(signature: Signature, asg: Assignment, psi: Formula) -> Formula:
    """[asg]K psi holds iff after learning the observables' post-intervention
    values the agent knows the intervention makes psi true."""
    if not signature.observables:
        raise EclogicError("the prediction schema needs observables")
    asg = signature.sort_assignment(asg)
    disjuncts = []
    for pairs in _observable_tuples(signature):
        delta = and_list([Intervene(asg, Atom(o, v)) for o, v in pairs])
        disjuncts.append(And(delta, Announce(delta, Know(Intervene(asg, psi)))))
    return iff(Intervene(asg, Know(psi)), or_list(disjuncts))


def no_learning_instance(signature: Signature, asg: Assignment, phi: Formula) -> Formula:
    asg = signature.sort_assignment(asg)
    return implies(Intervene(asg, Know(phi)), Know(Intervene(asg, phi)))


def perfect_recall_instance(signature: Signature, asg: Assignment, psi: Formula) -> Formula:
    asg = signature.sort_assignment(asg)
    return implies(Know(Intervene(asg, psi)), Intervene(asg, Know(psi)))


# ---------------------------------------------------------------------------
# schema matchers


def _boxed_atom(f: Formula) -> Optional[tuple[Assignment, Atom]]:
    if is_primed_atom(f):
        return f.assignment, f.sub
    return None


def _extends(signature, base: Assignment, var: str, value: str) -> Assignment:
    return signature.sort_assignment(Assignment(base.pairs + ((var, value),)))


def _match_p(f, sig):
    return is_tautology(f)


def _match_a1(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[1], Not):
        return False
    left = _boxed_atom(imp[0])
    right = _boxed_atom(imp[1].sub)
    return (
        left is not None
        and right is not None
        and left[0] == right[0]
        and left[1].variable == right[1].variable
        and left[1].value != right[1].value
    )


def _match_a2(f, sig):
    disjuncts = split_or(f) or [f]
    seed = _boxed_atom(disjuncts[0])
    if seed is None:
        return False
    asg, atom = seed
    if atom.variable not in sig.positions:
        return False
    expected = or_list(
        [Intervene(asg, Atom(atom.variable, y)) for y in sig.ranges[atom.variable]]
    )
    return f == expected


def _match_a3(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[0], And):
        return False
    first = _boxed_atom(imp[0].left)
    second = _boxed_atom(imp[0].right)
    conclusion = _boxed_atom(imp[1])
    if not (first and second and conclusion):
        return False
    asg, y_atom = first
    asg2, z_atom = second
    if asg != asg2 or conclusion[1] != z_atom:
        return False
    if y_atom.variable in asg.variables:
        return False
    return conclusion[0] == _extends(sig, asg, y_atom.variable, y_atom.value)


def _match_a4(f, sig):
    boxed = _boxed_atom(f)
    return boxed is not None and boxed[0].value_of(boxed[1].variable) == boxed[1].value


def _match_a5(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[0], And):
        return False
    first = _boxed_atom(imp[0].left)
    second = _boxed_atom(imp[0].right)
    conclusion = _boxed_atom(imp[1])
    if not (first and second and conclusion):
        return False
    asg_yz, z_atom = first
    asg_zy, y_atom = second
    asg, z_concl = conclusion
    if z_concl != z_atom or y_atom.variable == z_atom.variable:
        return False
    if y_atom.variable in asg.variables or z_atom.variable in asg.variables:
        return False
    return asg_yz == _extends(sig, asg, y_atom.variable, y_atom.value) and (
        asg_zy == _extends(sig, asg, z_atom.variable, z_atom.value)
    )


def _direct_cause_table(sig) -> dict[Formula, tuple[str, str]]:
    table = {}
    for v in sig.endogenous:
        for x in sig.order:
            if x != v and len(sig.ranges[x]) > 1 and len(sig.ranges[v]) > 1:
                table[direct_cause_formula(sig, x, v)] = (x, v)
    return table


def _match_a6(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[1], Not):
        return False
    table = _direct_cause_table(sig)
    conclusion = table.get(imp[1].sub)
    if conclusion is None:
        return False
    chain = [table.get(part) for part in flatten_and(imp[0])]
    if any(link is None for link in chain):
        return False
    if chain[0][0] != conclusion[1] or chain[-1][1] != conclusion[0]:
        return False
    return all(chain[i][1] == chain[i + 1][0] for i in range(len(chain) - 1))


def _match_a7(f, sig):
    both = as_iff(f)
    if not both:
        return False
    left = _boxed_atom(both[0])
    right = _boxed_atom(both[1])
    if not (left and right):
        return False
    if not left[0].is_empty() or left[1] != right[1]:
        return False
    u = left[1].variable
    return sig.is_exogenous(u) and u not in right[0].variables


def _match_a_box(f, sig):
    both = as_iff(f)
    return bool(
        both
        and isinstance(both[0], Atom)
        and both[1] == Intervene(EMPTY_ASSIGNMENT, both[0])
    )


def _match_a_neg(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Intervene) or not isinstance(both[0].sub, Not):
        return False
    return both[1] == Not(Intervene(both[0].assignment, both[0].sub.sub))


def _match_a_and(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Intervene) or not isinstance(both[0].sub, And):
        return False
    asg, body = both[0].assignment, both[0].sub
    return both[1] == And(Intervene(asg, body.left), Intervene(asg, body.right))


def _match_a_boxbox(f, sig):
    both = as_iff(f)
    if (
        not both
        or not isinstance(both[0], Intervene)
        or not isinstance(both[0].sub, Intervene)
        or not isinstance(both[1], Intervene)
    ):
        return False
    outer, inner = both[0].assignment, both[0].sub
    if both[1].sub != inner.sub:
        return False
    return both[1].assignment == merge_assignments(sig, outer, inner.assignment)


def _match_k(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[0], Know):
        return False
    inner = as_implies(imp[0].sub)
    if not inner:
        return False
    return imp[1] == implies(Know(inner[0]), Know(inner[1]))


def _match_t(f, sig):
    imp = as_implies(f)
    return bool(imp and isinstance(imp[0], Know) and imp[0].sub == imp[1])


def _match_four(f, sig):
    imp = as_implies(f)
    return bool(imp and isinstance(imp[0], Know) and imp[1] == Know(imp[0]))


def _match_five(f, sig):
    imp = as_implies(f)
    return bool(
        imp
        and isinstance(imp[0], Not)
        and isinstance(imp[0].sub, Know)
        and imp[1] == Know(imp[0])
    )


def _match_cm(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Intervene) or not isinstance(both[0].sub, Know):
        return False
    return both[1] == Know(Intervene(both[0].assignment, both[0].sub.sub))


def _match_kl(f, sig):
    imp = as_implies(f)
    if not imp:
        return False
    boxed = _boxed_atom(imp[0])
    if boxed is None or imp[1] != Know(imp[0]):
        return False
    asg, atom = boxed
    if sig.is_exogenous(atom.variable):
        return False
    return set(asg.variables) == set(sig.order) - {atom.variable}


def _match_bang_eq(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Announce):
        return False
    alpha, body = both[0].alpha, both[0].sub
    return is_primed_atom(body) and both[1] == implies(alpha, body)


def _match_bang_neg(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Announce) or not isinstance(both[0].sub, Not):
        return False
    alpha, body = both[0].alpha, both[0].sub
    return both[1] == implies(alpha, Not(Announce(alpha, body.sub)))


def _match_bang_and(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Announce) or not isinstance(both[0].sub, And):
        return False
    alpha, body = both[0].alpha, both[0].sub
    return both[1] == And(Announce(alpha, body.left), Announce(alpha, body.right))


def _match_bang_k(f, sig):
    both = as_iff(f)
    if not both or not isinstance(both[0], Announce) or not isinstance(both[0].sub, Know):
        return False
    alpha, body = both[0].alpha, both[0].sub
    return both[1] == implies(alpha, Know(implies(alpha, Announce(alpha, body.sub))))


def _match_bang_bang(f, sig):
    both = as_iff(f)
    if (
        not both
        or not isinstance(both[0], Announce)
        or not isinstance(both[0].sub, Announce)
    ):
        return False
    a1, inner = both[0].alpha, both[0].sub
    return both[1] == Announce(And(a1, Announce(a1, inner.alpha)), inner.sub)


def _match_k_bang(f, sig):
    imp = as_implies(f)
    if not imp or not isinstance(imp[0], Announce):
        return False
    alpha = imp[0].alpha
    inner = as_implies(imp[0].sub)
    if not inner:
        return False
    return imp[1] == implies(Announce(alpha, inner[0]), Announce(alpha, inner[1]))


def _match_eq_bang(f, sig):
    both = as_iff(f)
    if (
        not both
        or not isinstance(both[0], Intervene)
        or not isinstance(both[0].sub, Announce)
    ):
        return False
    asg, body = both[0].assignment, both[0].sub
    return both[1] == Announce(Intervene(asg, body.alpha), Intervene(asg, body.sub))


def _match_oc(f, sig):
    if not isinstance(f, Intervene) or not sig.observables:
        return False
    return f == constant_observables_instance(sig, f.assignment)


def _match_pd(f, sig):
    both = as_iff(f)
    if (
        not both
        or not sig.observables
        or not isinstance(both[0], Intervene)
        or not isinstance(both[0].sub, Know)
    ):
        return False
    asg, psi = both[0].assignment, both[0].sub.sub
    return f == prediction_instance(sig, asg, psi)


_MATCHERS: dict[str, Callable] = {
    "P": _match_p,
    "A1": _match_a1,
    "A2": _match_a2,
    "A3": _match_a3,
    "A4": _match_a4,
    "A5": _match_a5,
    "A6": _match_a6,
    "A7": _match_a7,
    "A_box": _match_a_box,
    "A_neg": _match_a_neg,
    "A_and": _match_a_and,
    "A_boxbox": _match_a_boxbox,
    "K": _match_k,
    "T": _match_t,
    "Four": _match_four,
    "Five": _match_five,
    "CM": _match_cm,
    "KL": _match_kl,
    "Neq_bang": _match_bang_eq,
    "Bang_neg": _match_bang_neg,
    "Bang_and": _match_bang_and,
    "Bang_K": _match_bang_k,
    "Bang_bang": _match_bang_bang,
    "K_bang": _match_k_bang,
    "Eq_bang": _match_eq_bang,
    "OC": _match_oc,
    "PD": _match_pd,
}

_LC_AXIOMS = ("P", "A1", "A2", "A3", "A4", "A5", "A6", "A7",
              "A_box", "A_neg", "A_and", "A_boxbox")
_LKC_AXIOMS = _LC_AXIOMS + ("K", "T", "Four", "Five", "CM", "KL")
_LPAKC_AXIOMS = _LKC_AXIOMS + (
    "Neq_bang", "Bang_neg", "Bang_and", "Bang_K", "Bang_bang", "K_bang", "Eq_bang",
)
_LPAKCO_AXIOMS = tuple(n for n in _LPAKC_AXIOMS if n != "CM") + ("OC", "PD")

SYSTEM_AXIOMS: dict[str, tuple[str, ...]] = {
    "LC": _LC_AXIOMS,
    "LKC": _LKC_AXIOMS,
    "LPAKC": _LPAKC_AXIOMS,
    "LPAKCO": _LPAKCO_AXIOMS,
}

SYSTEM_RULES: dict[str, tuple[str, ...]] = {
    "LC": ("premise", "mp"),
    "LKC": ("premise", "mp", "nk", "rek"),
    "LPAKC": ("premise", "mp", "nk", "rek", "neq", "nbang", "reeq", "rebang", "bangre"),
    "LPAKCO": ("premise", "mp", "nk", "rek", "neq", "nbang", "reeq", "rebang", "bangre"),
}

SYSTEM_MODE: dict[str, SemanticsMode] = {
    "LC": SemanticsMode.EPISTEMIC_W,
    "LKC": SemanticsMode.EPISTEMIC_W,
    "LPAKC": SemanticsMode.EPISTEMIC_W,
    "LPAKCO": SemanticsMode.OBSERVABLES_O,
}

SYSTEM_FRAGMENT: dict[str, FragmentTag] = {
    "LC": FragmentTag.LC,
    "LKC": FragmentTag.LKC,
    "LPAKC": FragmentTag.LPAKC,
    "LPAKCO": FragmentTag.LPAKC,
}


def match_axiom(f: Formula, name: str, signature: Signature, system: str) -> bool:
    """True iff f is a literal instance of the named schema, side conditions
    included; the name must be available in the given system."""
    if system not in SYSTEM_AXIOMS:
        raise EclogicError(f"unknown system {system!r}")
    if name not in SYSTEM_AXIOMS[system]:
        raise EclogicError(f"axiom {name!r} is not part of system {system}")
    return _MATCHERS[name](bind(f, signature), signature)


# ---------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Justification:
    rule: str
    refs: tuple[int, ...] = ()
    axiom: Optional[str] = None
    assignment: Optional[Assignment] = None
    formula: Optional[Formula] = None


@dataclass(frozen=True)
class Line:
    number: int
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Derivation:
    lines: tuple[Line, ...]


@dataclass
class Verdict:
    ok: bool
    failed_line: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(line: Line, message: str) -> Verdict:
    return Verdict(False, line.number, message)


def check_derivation(
    derivation: Derivation,
    system: str,
    signature: Signature,
    premises: Sequence[Formula] = (),
) -> Verdict:
    """Accept iff every line is a premise, a matching axiom instance, or a
    correct rule application to earlier lines; reports the first failure."""
    if system not in SYSTEM_AXIOMS:
        raise EclogicError(f"unknown system {system!r}")
    premises = [bind(p, signature) for p in premises]
    rules = SYSTEM_RULES[system]
    by_number: dict[int, Formula] = {}

    def ref(line: Line, index: int) -> Optional[Formula]:
        return by_number.get(index) if index < line.number else None

    for line in derivation.lines:
        just = line.justification
        f = line.formula
        if just.rule not in rules and just.rule != "axiom":
            return _fail(line, f"rule {just.rule!r} not available in {system}")
        if just.rule == "premise":
            if just.refs:
                k = just.refs[0]
                if not (1 <= k <= len(premises)):
                    return _fail(line, f"premise index {k} out of range")
                if f != premises[k - 1]:
                    return _fail(line, f"line does not match premise {k}")
            elif f not in premises:
                return _fail(line, "formula is not among the premises")
        elif just.rule == "axiom":
            if just.axiom not in SYSTEM_AXIOMS[system]:
                return _fail(line, f"axiom {just.axiom!r} not in system {system}")
            if not _MATCHERS[just.axiom](f, signature):
                return _fail(line, f"not an instance of {just.axiom}")
        elif just.rule == "mp":
            major, minor = (ref(line, i) for i in just.refs)
            if major is None or minor is None:
                return _fail(line, "modus ponens must reference earlier lines")
            imp = as_implies(major)
            if imp is None:
                return _fail(line, "first referenced line is not an implication")
            if imp[0] != minor:
                return _fail(line, "second referenced line is not the antecedent")
            if imp[1] != f:
                return _fail(line, "conclusion differs from the consequent")
        elif just.rule == "nk":
            base = ref(line, just.refs[0])
            if base is None:
                return _fail(line, "necessitation must reference an earlier line")
            if f != Know(base):
                return _fail(line, "conclusion is not K of the referenced line")
        elif just.rule == "neq":
            base = ref(line, just.refs[0])
            if base is None or just.assignment is None:
                return _fail(line, "intervention necessitation needs a line and an assignment")
            if f != Intervene(signature.sort_assignment(just.assignment), base):
                return _fail(line, "conclusion is not the boxed referenced line")
        elif just.rule == "nbang":
            base = ref(line, just.refs[0])
            if base is None or just.formula is None:
                return _fail(line, "announcement necessitation needs a line and a formula")
            if f != Announce(just.formula, base):
                return _fail(line, "conclusion is not the announced referenced line")
        elif just.rule == "rek":
            base = ref(line, just.refs[0])
            pair = as_iff(base) if base is not None else None
            if pair is None:
                return _fail(line, "referenced line is not a biconditional")
            if f != iff(Know(pair[0]), Know(pair[1])):
                return _fail(line, "conclusion is not the K-congruent biconditional")
        elif just.rule == "reeq":
            base = ref(line, just.refs[0])
            pair = as_iff(base) if base is not None else None
            if pair is None or just.assignment is None:
                return _fail(line, "rule needs a biconditional line and an assignment")
            asg = signature.sort_assignment(just.assignment)
            if f != iff(Intervene(asg, pair[0]), Intervene(asg, pair[1])):
                return _fail(line, "conclusion is not the boxed congruent biconditional")
        elif just.rule == "rebang":
            base = ref(line, just.refs[0])
            pair = as_iff(base) if base is not None else None
            if pair is None or just.formula is None:
                return _fail(line, "rule needs a biconditional line and an announcement")
            alpha = just.formula
            if f != iff(Announce(alpha, pair[0]), Announce(alpha, pair[1])):
                return _fail(line, "conclusion is not the announced congruent biconditional")
        elif just.rule == "bangre":
            base = ref(line, just.refs[0])
            pair = as_iff(base) if base is not None else None
            if pair is None or just.formula is None:
                return _fail(line, "rule needs a biconditional line and a body formula")
            chi = just.formula
            if f != iff(Announce(pair[0], chi), Announce(pair[1], chi)):
                return _fail(line, "conclusion does not swap the announced formulas")
        else:  # pragma: no cover
            return _fail(line, f"unknown rule {just.rule!r}")
        by_number[line.number] = f
    return Verdict(True)


# ---------------------------------------------------------------------------
# derivation file format
#
#   <n>. <formula> ; <justification>
#
# Justifications: premise [k] | axiom NAME | mp i j | nk i | neq i [assigns]
# | nbang i (formula) | rek i | reeq i [assigns] | rebang i (formula)
# | bangre i (formula).  Blank lines and lines starting with '#' are skipped.

_LINE_RE = re.compile(r"^\s*(\d+)\.\s*(.*?)\s*;\s*(.*?)\s*$")


def _parse_assign_text(text: str, signature: Signature) -> Assignment:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise DerivationError(f"expected [assignments], got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return EMPTY_ASSIGNMENT
    pairs = []
    for piece in inner.split(","):
        if "=" not in piece:
            raise DerivationError(f"malformed assignment piece {piece!r}")
        var, val = (part.strip() for part in piece.split("=", 1))
        pairs.append((var, val))
    asg = Assignment(tuple(pairs))
    for var, val in pairs:
        if var not in signature.positions or val not in signature.ranges[var]:
            raise DerivationError(f"assignment {var}={val} is outside the signature")
    return signature.sort_assignment(asg)


def _parse_justification(text: str, signature: Signature) -> Justification:
    text = text.strip()
    head, _, rest = text.partition(" ")
    head = head.lower()
    rest = rest.strip()
    if head == "premise":
        refs = (int(rest),) if rest else ()
        return Justification("premise", refs)
    if head == "axiom":
        if rest not in _MATCHERS:
            raise DerivationError(f"unknown axiom name {rest!r}")
        return Justification("axiom", axiom=rest)
    if head == "mp":
        i, j = rest.split()
        return Justification("mp", (int(i), int(j)))
    if head in ("nk", "rek"):
        return Justification(head, (int(rest),))
    if head in ("neq", "reeq"):
        index, _, asg_text = rest.partition(" ")
        return Justification(
            head, (int(index),), assignment=_parse_assign_text(asg_text, signature)
        )
    if head in ("nbang", "rebang", "bangre"):
        index, _, formula_text = rest.partition(" ")
        formula_text = formula_text.strip()
        if not (formula_text.startswith("(") and formula_text.endswith(")")):
            raise DerivationError("rule formula must be parenthesized")
        return Justification(
            head, (int(index),), formula=parse(formula_text[1:-1], signature)
        )
    raise DerivationError(f"unknown justification {text!r}")


def parse_derivation(text: str, signature: Signature) -> Derivation:
    lines = []
    expected = 1
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        matched = _LINE_RE.match(raw)
        if not matched:
            raise DerivationError(f"malformed derivation line: {raw!r}")
        number = int(matched.group(1))
        if number != expected:
            raise DerivationError(f"line numbers must be consecutive, got {number}")
        expected += 1
        formula = parse(matched.group(2), signature)
        justification = _parse_justification(matched.group(3), signature)
        lines.append(Line(number, formula, justification))
    if not lines:
        raise DerivationError("derivation is empty")
    return Derivation(tuple(lines))


# ---------------------------------------------------------------------------
# soundness audit


@dataclass
class SchemaAudit:
    name: str
    instances: int = 0
    counterexamples: list = field(default_factory=list)


@dataclass
class SoundnessReport:
    system: str
    mode: SemanticsMode
    models: int = 0
    schemas: dict[str, SchemaAudit] = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return all(not audit.counterexamples for audit in self.schemas.values())

    def counterexample_schemas(self) -> list[str]:
        return [n for n, audit in self.schemas.items() if audit.counterexamples]

    def summary(self) -> str:
        bad = self.counterexample_schemas()
        status = "no counterexamples" if not bad else f"counterexamples in {bad}"
        total = sum(a.instances for a in self.schemas.values())
        return (
            f"{self.system} under {self.mode.value}: {total} instances on "
            f"{self.models} pointed models, {status}"
        )


class InstanceSampler:
    """Random concrete instances of each schema over a signature."""

    def __init__(self, signature: Signature, seed: int, depth: int = 2,
                 fragment_tag: FragmentTag = FragmentTag.LPAKC):
        self.sig = signature
        self.rng = random.Random(seed)
        self.depth = depth
        self.fragment_tag = fragment_tag

    def assignment(self, allow_empty: bool = True) -> Assignment:
        sig = self.sig
        low = 0 if allow_empty else 1
        k = self.rng.randint(low, len(sig.order))
        vars_ = sorted(self.rng.sample(sig.order, k), key=sig.positions.__getitem__)
        return Assignment(tuple((v, self.rng.choice(sig.ranges[v])) for v in vars_))

    def formula(self) -> Formula:
        from .explore import sample_formulas

        return sample_formulas(
            self.sig, self.depth, 1, self.rng.randrange(1 << 30), self.fragment_tag
        )[0]

    def atom(self, variable: Optional[str] = None) -> Atom:
        var = variable or self.rng.choice(self.sig.order)
        return Atom(var, self.rng.choice(self.sig.ranges[var]))

    def instance(self, name: str) -> Optional[Formula]:
        """A concrete instance, or None when the signature admits none.

        Single draws can fail on side conditions (say, a random assignment
        covering every variable when a free one is needed), so draws are
        retried; only structural impossibility yields None.
        """
        for _ in range(32):
            candidate = self._draw(name)
            if candidate is not None:
                return candidate
        return None

    def _draw(self, name: str) -> Optional[Formula]:
        sig, rng = self.sig, self.rng
        if name == "P":
            a, b = self.formula(), self.formula()
            template = rng.randrange(3)
            if template == 0:
                return or_list([a, Not(a)])
            if template == 1:
                return implies(And(a, b), a)
            return implies(a, implies(b, a))
        if name == "A1":
            candidates = [v for v in sig.order if len(sig.ranges[v]) > 1]
            if not candidates:
                return None
            y = rng.choice(candidates)
            y1, y2 = rng.sample(sig.ranges[y], 2)
            asg = self.assignment()
            return implies(
                Intervene(asg, Atom(y, y1)), Not(Intervene(asg, Atom(y, y2)))
            )
        if name == "A2":
            atom = self.atom()
            return constant_range_instance(sig, self.assignment(), atom.variable)
        if name == "A3":
            asg = self.assignment()
            free = [v for v in sig.order if v not in asg.variables]
            if not free:
                return None
            y = rng.choice(free)
            y_atom = self.atom(y)
            z_atom = self.atom()
            merged = _extends(sig, asg, y_atom.variable, y_atom.value)
            return implies(
                And(Intervene(asg, y_atom), Intervene(asg, z_atom)),
                Intervene(merged, z_atom),
            )
        if name == "A4":
            asg = self.assignment(allow_empty=False)
            var, val = rng.choice(asg.pairs)
            return Intervene(asg, Atom(var, val))
        if name == "A5":
            asg = self.assignment()
            free = [v for v in sig.order if v not in asg.variables]
            if len(free) < 2:
                return None
            y, z = rng.sample(free, 2)
            y_atom, z_atom = self.atom(y), self.atom(z)
            return implies(
                And(
                    Intervene(_extends(sig, asg, y, y_atom.value), z_atom),
                    Intervene(_extends(sig, asg, z, z_atom.value), y_atom),
                ),
                Intervene(asg, z_atom),
            )
        if name == "A6":
            endo = [v for v in sig.endogenous if len(sig.ranges[v]) > 1]
            if len(endo) < 2:
                return None
            k = rng.randint(1, min(3, len(endo) - 1))
            chain_vars = rng.sample(endo, k + 1)
            links = [
                direct_cause_formula(sig, chain_vars[i], chain_vars[i + 1])
                for i in range(k)
            ]
            closing = direct_cause_formula(sig, chain_vars[-1], chain_vars[0])
            return implies(and_list(links), Not(closing))
        if name == "A7":
            if not sig.exogenous:
                return None
            u = rng.choice(sig.exogenous)
            u_atom = self.atom(u)
            others = [v for v in sig.order if v != u]
            kk = rng.randint(0, len(others))
            vars_ = sorted(rng.sample(others, kk), key=sig.positions.__getitem__)
            asg = Assignment(tuple((v, rng.choice(sig.ranges[v])) for v in vars_))
            return iff(Intervene(EMPTY_ASSIGNMENT, u_atom), Intervene(asg, u_atom))
        if name == "A_box":
            atom = self.atom()
            return iff(atom, Intervene(EMPTY_ASSIGNMENT, atom))
        if name == "A_neg":
            asg, phi = self.assignment(), self.formula()
            return iff(Intervene(asg, Not(phi)), Not(Intervene(asg, phi)))
        if name == "A_and":
            asg, p1, p2 = self.assignment(), self.formula(), self.formula()
            return iff(
                Intervene(asg, And(p1, p2)),
                And(Intervene(asg, p1), Intervene(asg, p2)),
            )
        if name == "A_boxbox":
            outer, inner, phi = self.assignment(), self.assignment(), self.formula()
            return iff(
                Intervene(outer, Intervene(inner, phi)),
                Intervene(merge_assignments(sig, outer, inner), phi),
            )
        if name == "K":
            a, b = self.formula(), self.formula()
            return implies(Know(implies(a, b)), implies(Know(a), Know(b)))
        if name == "T":
            a = self.formula()
            return implies(Know(a), a)
        if name == "Four":
            a = self.formula()
            return implies(Know(a), Know(Know(a)))
        if name == "Five":
            a = self.formula()
            return implies(Not(Know(a)), Know(Not(Know(a))))
        if name == "CM":
            return iff_cm(sig, self.assignment(), self.formula())
        if name == "KL":
            endo = list(sig.endogenous)
            if not endo or len(sig.order) < 2:
                return None
            y = rng.choice(endo)
            others = [v for v in sig.order if v != y]
            asg = Assignment(tuple((v, rng.choice(sig.ranges[v])) for v in others))
            boxed = Intervene(sig.sort_assignment(asg), self.atom(y))
            return implies(boxed, Know(boxed))
        if name == "Neq_bang":
            alpha = self.formula()
            boxed = Intervene(self.assignment(), self.atom())
            return iff(Announce(alpha, boxed), implies(alpha, boxed))
        if name == "Bang_neg":
            alpha, chi = self.formula(), self.formula()
            return iff(
                Announce(alpha, Not(chi)), implies(alpha, Not(Announce(alpha, chi)))
            )
        if name == "Bang_and":
            alpha, c1, c2 = self.formula(), self.formula(), self.formula()
            return iff(
                Announce(alpha, And(c1, c2)),
                And(Announce(alpha, c1), Announce(alpha, c2)),
            )
        if name == "Bang_K":
            alpha, chi = self.formula(), self.formula()
            return iff(
                Announce(alpha, Know(chi)),
                implies(alpha, Know(implies(alpha, Announce(alpha, chi)))),
            )
        if name == "Bang_bang":
            a1, a2, chi = self.formula(), self.formula(), self.formula()
            return iff(
                Announce(a1, Announce(a2, chi)),
                Announce(And(a1, Announce(a1, a2)), chi),
            )
        if name == "K_bang":
            alpha, c1, c2 = self.formula(), self.formula(), self.formula()
            return implies(
                Announce(alpha, implies(c1, c2)),
                implies(Announce(alpha, c1), Announce(alpha, c2)),
            )
        if name == "Eq_bang":
            asg, alpha, chi = self.assignment(), self.formula(), self.formula()
            return iff(
                Intervene(asg, Announce(alpha, chi)),
                Announce(Intervene(asg, alpha), Intervene(asg, chi)),
            )
        if name == "OC":
            if not sig.observables:
                return None
            return constant_observables_instance(sig, self.assignment())
        if name == "PD":
            if not sig.observables:
                return None
            return prediction_instance(sig, self.assignment(), self.formula())
        raise EclogicError(f"no instance generator for {name!r}")


def constant_range_instance(signature: Signature, asg: Assignment, variable: str) -> Formula:
    """[asg] takes some value of the variable's range (the full disjunction)."""
    asg = signature.sort_assignment(asg)
    return or_list(
        [Intervene(asg, Atom(variable, y)) for y in signature.ranges[variable]]
    )


def iff_cm(signature: Signature, asg: Assignment, xi: Formula) -> Formula:
    asg = signature.sort_assignment(asg)
    return iff(Intervene(asg, Know(xi)), Know(Intervene(asg, xi)))


def audit_soundness(
    system: str,
    signature: Signature,
    caps=None,
    instances_per_schema: int = 50,
    seed: int = 0,
    schemas: Optional[Sequence[str]] = None,
    max_counterexamples_per_schema: int = 5,
    mode: Optional[SemanticsMode] = None,
) -> SoundnessReport:
    """Generate random instances of each schema and verify them on every
    enumerated pointed model under the system's semantics (or an explicit
    mode, for probing a schema outside its home system)."""
    from .epistemic import PointedModel, _Memo, _eval
    from .explore import EnumerationCaps, enumerate_models

    caps = caps or EnumerationCaps()
    mode = mode or SYSTEM_MODE[system]
    models = list(enumerate_models(signature, caps, mode))
    report = SoundnessReport(system, mode, models=sum(len(m.team) for m in models))
    sampler = InstanceSampler(
        signature, seed, depth=2, fragment_tag=SYSTEM_FRAGMENT[system]
    )
    for name in schemas if schemas is not None else SYSTEM_AXIOMS[system]:
        audit = SchemaAudit(name)
        report.schemas[name] = audit
        for _ in range(instances_per_schema):
            instance = sampler.instance(name)
            if instance is None:
                continue
            instance = bind(instance, signature)
            audit.instances += 1
            witness = None
            for model in models:
                # shared per-model memo: the team updates an instance
                # triggers are identical across its evaluation points
                memo = _Memo()
                for member in model.team:
                    if not _eval(model, member, instance, mode, memo):
                        witness = PointedModel(model, member)
                        break
                if witness is not None:
                    break
            if witness is not None:
                if len(audit.counterexamples) < max_counterexamples_per_schema:
                    audit.counterexamples.append((instance, witness))
                else:
                    audit.counterexamples.append((instance, None))
    return report
