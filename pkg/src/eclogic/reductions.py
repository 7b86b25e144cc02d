"""Reduction-axiom translations between the language fragments.

* ``TR1``   pushes intervention boxes through Booleans and merges nested
  boxes, landing in Boolean combinations of boxed atoms.
* ``TR2``   additionally commutes boxes with K.
* ``TR3``   additionally normalizes announcements inside boxes, landing in
  the primed announcement fragment.
* ``TR4``   eliminates announcement operators from that fragment.
* ``TR_FULL`` is TR4 after TR3.
* ``TR3_PD`` replaces the box-over-K step of TR3 by the prediction-axiom
  disjunction over the observable tuple's possible values, which is the
  sound way to extract K from under a box when intervening also reveals
  the observables.

Implications appearing on clause right-hand sides desugar to the negation
/conjunction core; the strict complexity decrease survives the desugaring
(``check_decrease=True`` asserts it clause by clause).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .errors import BudgetExceededError, FragmentError
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
    Measure,
    Not,
    and_list,
    complexity,
    count_nodes,
    fragment,
    implies,
    is_primed_atom,
    or_list,
    to_text,
)


class TranslationKind(enum.Enum):
    TR1 = "tr1"
    TR2 = "tr2"
    TR3 = "tr3"
    TR4 = "tr4"
    TR_FULL = "tr"
    TR3_PD = "tr3pd"


_SOURCE = {
    TranslationKind.TR1: FragmentTag.LC,
    TranslationKind.TR2: FragmentTag.LKC,
    TranslationKind.TR3: FragmentTag.LPAKC,
    TranslationKind.TR4: FragmentTag.LPAKCp,
    TranslationKind.TR_FULL: FragmentTag.LPAKC,
    TranslationKind.TR3_PD: FragmentTag.LPAKC,
}

_TARGET = {
    TranslationKind.TR1: FragmentTag.LCp,
    TranslationKind.TR2: FragmentTag.LKCp,
    TranslationKind.TR3: FragmentTag.LPAKCp,
    TranslationKind.TR4: FragmentTag.LKCp,
    TranslationKind.TR_FULL: FragmentTag.LKCp,
    TranslationKind.TR3_PD: FragmentTag.LPAKCp,
}

_MEASURE = {
    TranslationKind.TR1: Measure.C,
    TranslationKind.TR2: Measure.KC,
    TranslationKind.TR3: Measure.PAKC,
    TranslationKind.TR4: Measure.PAKCp,
}


def source_fragment(kind: TranslationKind) -> FragmentTag:
    return _SOURCE[kind]


def target_fragment(kind: TranslationKind) -> FragmentTag:
    return _TARGET[kind]


def merge_assignments(signature, outer: Assignment, inner: Assignment) -> Assignment:
    """Outer assignment overridden by the inner one (the subassignment for
    the variables the inner does not touch, plus the inner itself)."""
    inner_vars = set(inner.variables)
    pairs = tuple(p for p in outer.pairs if p[0] not in inner_vars) + inner.pairs
    return signature.sort_assignment(Assignment(pairs))


class _Decrease:
    """Optional clause-by-clause termination audit."""

    def __init__(self, measure: Measure, enabled: bool):
        self.measure = measure
        self.enabled = enabled

    def check(self, lhs: Formula, rhs_arg: Formula) -> None:
        if self.enabled:
            before = complexity(lhs, self.measure)
            after = complexity(rhs_arg, self.measure)
            assert after < before, (
                f"complexity must drop: {to_text(lhs)} ({before}) -> "
                f"{to_text(rhs_arg)} ({after})"
            )


def _tr1_like(f: Formula, signature, dec: _Decrease, know: bool) -> Formula:
    def rec(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Intervene(EMPTY_ASSIGNMENT, g)
        if isinstance(g, Not):
            return Not(rec(g.sub))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if know and isinstance(g, Know):
            return Know(rec(g.sub))
        if isinstance(g, Intervene):
            body = g.sub
            if isinstance(body, Atom):
                return g
            if isinstance(body, Not):
                step = Not(Intervene(g.assignment, body.sub))
            elif isinstance(body, And):
                step = And(
                    Intervene(g.assignment, body.left),
                    Intervene(g.assignment, body.right),
                )
            elif know and isinstance(body, Know):
                step = Know(Intervene(g.assignment, body.sub))
            elif isinstance(body, Intervene):
                step = Intervene(
                    merge_assignments(signature, g.assignment, body.assignment), body.sub
                )
            else:
                raise FragmentError(f"construct outside the source fragment: {to_text(g)}")
            dec.check(g, step)
            return rec(step)
        raise FragmentError(f"construct outside the source fragment: {to_text(g)}")

    return rec(f)


def _tr3(f: Formula, signature, dec: _Decrease) -> Formula:
    def rec(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Intervene(EMPTY_ASSIGNMENT, g)
        if isinstance(g, Not):
            return Not(rec(g.sub))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Know):
            return Know(rec(g.sub))
        if isinstance(g, Announce):
            return Announce(rec(g.alpha), rec(g.sub))
        if isinstance(g, Intervene):
            asg, body = g.assignment, g.sub
            if isinstance(body, Atom):
                return g
            if isinstance(body, Not):
                step: Formula = Not(Intervene(asg, body.sub))
            elif isinstance(body, And):
                step = And(Intervene(asg, body.left), Intervene(asg, body.right))
            elif isinstance(body, Know):
                step = Know(Intervene(asg, body.sub))
            elif isinstance(body, Intervene):
                step = Intervene(
                    merge_assignments(signature, asg, body.assignment), body.sub
                )
            elif isinstance(body, Announce):
                alpha, chi = body.alpha, body.sub
                if isinstance(chi, Atom):
                    step = Intervene(asg, implies(alpha, chi))
                elif isinstance(chi, Not):
                    step = Intervene(asg, implies(alpha, Not(Announce(alpha, chi.sub))))
                elif isinstance(chi, And):
                    step = Intervene(
                        asg, And(Announce(alpha, chi.left), Announce(alpha, chi.right))
                    )
                elif isinstance(chi, Know):
                    step = Intervene(
                        asg, implies(alpha, Know(implies(alpha, Announce(alpha, chi.sub))))
                    )
                elif isinstance(chi, Announce):
                    step = Intervene(
                        asg,
                        Announce(And(alpha, Announce(alpha, chi.alpha)), chi.sub),
                    )
                elif isinstance(chi, Intervene):
                    step = Announce(
                        Intervene(asg, alpha),
                        Intervene(
                            merge_assignments(signature, asg, chi.assignment), chi.sub
                        ),
                    )
                else:
                    raise FragmentError(f"not a formula under announcement: {to_text(g)}")
            else:
                raise FragmentError(f"construct outside the source fragment: {to_text(g)}")
            dec.check(g, step)
            return rec(step)
        raise FragmentError(f"construct outside the source fragment: {to_text(g)}")

    return rec(f)


def _tr4(f: Formula, signature, dec: _Decrease) -> Formula:
    def rec(g: Formula) -> Formula:
        if is_primed_atom(g):
            return g
        if isinstance(g, Not):
            return Not(rec(g.sub))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Know):
            return Know(rec(g.sub))
        if isinstance(g, Announce):
            alpha, body = g.alpha, g.sub
            if is_primed_atom(body):
                step = implies(alpha, body)
            elif isinstance(body, Not):
                step = implies(alpha, Not(Announce(alpha, body.sub)))
            elif isinstance(body, And):
                step = And(Announce(alpha, body.left), Announce(alpha, body.right))
            elif isinstance(body, Know):
                step = implies(alpha, Know(implies(alpha, Announce(alpha, body.sub))))
            elif isinstance(body, Announce):
                step = Announce(And(alpha, Announce(alpha, body.alpha)), body.sub)
            else:
                raise FragmentError(
                    f"announcement body outside the primed fragment: {to_text(g)}"
                )
            dec.check(g, step)
            return rec(step)
        raise FragmentError(f"construct outside the primed fragment: {to_text(g)}")

    return rec(f)


def _observable_disjunction(signature, asg: Assignment, inner: Formula) -> Formula:
    """The prediction-axiom disjunction over every observable tuple value."""
    obs = signature.observables
    disjuncts = []
    for values in itertools.product(*(signature.ranges[o] for o in obs)):
        delta = and_list([Intervene(asg, Atom(o, v)) for o, v in zip(obs, values)])
        disjuncts.append(And(delta, Announce(delta, Know(inner))))
    return or_list(disjuncts)


def _tr3_pd(f: Formula, signature, max_nodes: int) -> Formula:
    if not signature.observables:
        raise FragmentError("the prediction translation needs a non-empty observable set")

    budget = [max_nodes]

    def spend(n: int) -> None:
        budget[0] -= n
        if budget[0] < 0:
            raise BudgetExceededError(
                f"prediction translation exceeds its {max_nodes}-node budget"
            )

    def push(asg: Assignment, theta: Formula) -> Formula:
        # theta is already in the primed announcement fragment
        if is_primed_atom(theta):
            return Intervene(
                merge_assignments(signature, asg, theta.assignment), theta.sub
            )
        if isinstance(theta, Not):
            return Not(push(asg, theta.sub))
        if isinstance(theta, And):
            return And(push(asg, theta.left), push(asg, theta.right))
        if isinstance(theta, Know):
            inner = push(asg, theta.sub)
            out = _observable_disjunction(signature, asg, inner)
            spend(count_nodes(out) - count_nodes(inner))
            return out
        if isinstance(theta, Announce):
            return Announce(push(asg, theta.alpha), push(asg, theta.sub))
        raise FragmentError(f"construct outside the primed fragment: {to_text(theta)}")

    def rec(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Intervene(EMPTY_ASSIGNMENT, g)
        if isinstance(g, Not):
            return Not(rec(g.sub))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Know):
            return Know(rec(g.sub))
        if isinstance(g, Announce):
            return Announce(rec(g.alpha), rec(g.sub))
        if isinstance(g, Intervene):
            return push(g.assignment, rec(g.sub))
        raise FragmentError(f"construct outside the source fragment: {to_text(g)}")

    return rec(f)


def translate(
    f: Formula,
    kind: TranslationKind,
    signature,
    *,
    check_decrease: bool = False,
    max_nodes: int = 500_000,
) -> Formula:
    """Apply the selected translation; the input must lie in its source
    fragment and the output always classifies into its target fragment."""
    if _SOURCE[kind] not in fragment(f):
        raise FragmentError(
            f"formula is not in the {_SOURCE[kind].value} fragment: {to_text(f)}"
        )
    if kind is TranslationKind.TR1:
        out = _tr1_like(f, signature, _Decrease(Measure.C, check_decrease), know=False)
    elif kind is TranslationKind.TR2:
        out = _tr1_like(f, signature, _Decrease(Measure.KC, check_decrease), know=True)
    elif kind is TranslationKind.TR3:
        out = _tr3(f, signature, _Decrease(Measure.PAKC, check_decrease))
    elif kind is TranslationKind.TR4:
        out = _tr4(f, signature, _Decrease(Measure.PAKCp, check_decrease))
    elif kind is TranslationKind.TR_FULL:
        middle = _tr3(f, signature, _Decrease(Measure.PAKC, check_decrease))
        if FragmentTag.LPAKCp not in fragment(middle):
            raise FragmentError("intermediate result left the primed fragment")
        out = _tr4(middle, signature, _Decrease(Measure.PAKCp, check_decrease))
    elif kind is TranslationKind.TR3_PD:
        out = _tr3_pd(f, signature, max_nodes)
    else:  # pragma: no cover
        raise ValueError(kind)
    assert _TARGET[kind] in fragment(out)
    return out


@dataclass
class EquivalenceReport:
    checked: int = 0
    differences: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.checked == 0

    @property
    def equivalent(self) -> bool:
        return not self.differences and not self.vacuous

    def summary(self) -> str:
        if self.vacuous:
            return "vacuous: no pointed models sampled"
        if self.differences:
            return f"{len(self.differences)} of {self.checked} pointed models disagree"
        return f"agree on all {self.checked} pointed models"


def check_equivalence(f: Formula, g: Formula, mode, sampler) -> EquivalenceReport:
    """Compare the truth of two formulas on every sampled pointed model."""
    from .epistemic import evaluate

    report = EquivalenceReport()
    for pointed in sampler:
        report.checked += 1
        left = evaluate(pointed, f, mode)
        right = evaluate(pointed, g, mode)
        if left != right:
            report.differences.append((pointed, left, right))
    return report
