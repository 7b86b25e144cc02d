"""Exhaustive model enumeration, formula sampling and validity search.

Enumerated function sets use the full other-variables domain, faithful to
the definition of a structural function; budgets are estimated analytically
before any enumeration starts and exceeding one is an error, never a silent
truncation.  All streams are deterministic: tables in lexicographic order,
teams in ascending bitmask order over the canonically sorted solution list,
points in team order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .epistemic import EpistemicModel, PointedModel, SemanticsMode, evaluate
from .errors import BudgetExceededError, EclogicError
from .models import FunctionSet, Signature, Valuation, intervene_causal, solve
from .syntax import (
    And,
    Announce,
    Assignment,
    Atom,
    Formula,
    FragmentTag,
    Intervene,
    Know,
    Not,
    bind,
)


@dataclass(frozen=True)
class EnumerationCaps:
    max_table_entries: int = 256      # summed over all structural functions
    max_valuations: int = 64          # compliant valuations per function set
    max_teams: int = 65_536           # teams per function set
    max_pointed: int = 2_000_000      # hard budget on the whole stream
    formula_depth: int = 4
    seed: int = 0

    def __post_init__(self):
        for name in ("max_table_entries", "max_valuations", "max_teams", "max_pointed"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def estimate_function_sets(signature: Signature) -> tuple[int, int]:
    """(number of function sets, total table entries per set)."""
    count = 1
    entries = 0
    for v in signature.endogenous:
        domain = 1
        for w in signature.order:
            if w != v:
                domain *= len(signature.ranges[w])
        entries += domain
        count *= len(signature.ranges[v]) ** domain
    return count, entries


def estimate_pointed(signature: Signature, caps: EnumerationCaps) -> int:
    """Upper bound for the pointed-model stream length."""
    n_sets, _ = estimate_function_sets(signature)
    solutions = 1
    for u in signature.exogenous:
        solutions *= len(signature.ranges[u])
    points_per_set = sum(
        k * _comb(solutions, k) for k in range(1, solutions + 1)
    )
    return n_sets * points_per_set


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def enumerate_functions(
    signature: Signature, caps: EnumerationCaps = EnumerationCaps()
) -> Iterator[FunctionSet]:
    """Every recursive function set over the full other-variables domains."""
    n_sets, entries = estimate_function_sets(signature)
    if entries > caps.max_table_entries:
        raise BudgetExceededError(
            f"{entries} table entries exceed the cap of {caps.max_table_entries}"
        )
    if n_sets > caps.max_pointed:
        raise BudgetExceededError(
            f"{n_sets} function sets exceed the hard budget of {caps.max_pointed}"
        )
    per_variable: list[list[tuple[str, tuple[str, ...], dict]]] = []
    for v in signature.endogenous:
        parents = tuple(w for w in signature.order if w != v)
        domain = list(
            itertools.product(*(range(len(signature.ranges[p])) for p in parents))
        )
        tables = []
        for outputs in itertools.product(
            range(len(signature.ranges[v])), repeat=len(domain)
        ):
            tables.append((v, parents, dict(zip(domain, outputs))))
        per_variable.append(tables)
    for combo in itertools.product(*per_variable):
        functions = FunctionSet(
            signature, {v: (parents, table) for v, parents, table in combo}
        )
        if functions.graph().is_acyclic():
            yield functions


def _solutions(signature: Signature, functions: FunctionSet) -> list[Valuation]:
    return sorted(solve(functions, exo) for exo in signature.all_exogenous_choices())


def _teams(
    signature: Signature,
    solutions: list[Valuation],
    mode: SemanticsMode,
    caps: EnumerationCaps,
) -> Iterator[tuple[Valuation, ...]]:
    n = len(solutions)
    if n > caps.max_valuations:
        raise BudgetExceededError(
            f"{n} compliant valuations exceed the cap of {caps.max_valuations}"
        )
    if 2 ** n - 1 > caps.max_teams:
        raise BudgetExceededError(
            f"{2 ** n - 1} teams exceed the cap of {caps.max_teams}"
        )
    obs_pos = tuple(signature.positions[o] for o in signature.observables)
    for mask in range(1, 2 ** n):
        team = tuple(solutions[i] for i in range(n) if mask & (1 << i))
        if mode is SemanticsMode.OBSERVABLES_O and obs_pos:
            first = team[0]
            if any(m[p] != first[p] for m in team for p in obs_pos):
                continue
        yield team


def enumerate_models(
    signature: Signature,
    caps: EnumerationCaps = EnumerationCaps(),
    mode: SemanticsMode = SemanticsMode.EPISTEMIC_W,
) -> Iterator[EpistemicModel]:
    """Every epistemic model: recursive function set x non-empty team of
    compliant valuations (observable-constant teams only under obs mode)."""
    if estimate_pointed(signature, caps) > caps.max_pointed:
        raise BudgetExceededError(
            f"estimated {estimate_pointed(signature, caps)} pointed models exceed "
            f"the hard budget of {caps.max_pointed}"
        )
    for functions in enumerate_functions(signature, caps):
        solutions = _solutions(signature, functions)
        for team in _teams(signature, solutions, mode, caps):
            yield EpistemicModel(signature, functions, team, _trusted=True)


def enumerate_pointed(
    signature: Signature,
    caps: EnumerationCaps = EnumerationCaps(),
    mode: SemanticsMode = SemanticsMode.EPISTEMIC_W,
) -> Iterator[PointedModel]:
    for model in enumerate_models(signature, caps, mode):
        for member in model.team:
            yield PointedModel(model, member)


@dataclass
class ValidityResult:
    valid: bool
    counterexample: Optional[PointedModel]
    models_checked: int

    def __bool__(self) -> bool:
        return self.valid


def check_validity(
    signature: Signature,
    f: Formula,
    mode: SemanticsMode = SemanticsMode.EPISTEMIC_W,
    caps: EnumerationCaps = EnumerationCaps(),
) -> ValidityResult:
    """Exhaustive sweep; returns the first counterexample in enumeration
    order, or a verdict of validity at this signature scale."""
    f = bind(f, signature)
    checked = 0
    for pointed in enumerate_pointed(signature, caps, mode):
        checked += 1
        if not evaluate(pointed, f, mode, assume_bound=True):
            return ValidityResult(False, pointed, checked)
    return ValidityResult(True, None, checked)


def check_validity_many(
    signature: Signature,
    formulas,
    mode: SemanticsMode = SemanticsMode.EPISTEMIC_W,
    caps: EnumerationCaps = EnumerationCaps(),
) -> list[ValidityResult]:
    """Validity of many formulas over one enumeration pass.

    Model updates are cached per (formula, model), so checking a batch is
    much cheaper than one check_validity call per formula.
    """
    from .epistemic import _Memo, _eval

    formulas = [bind(f, signature) for f in formulas]
    models = list(enumerate_models(signature, caps, mode))
    results = []
    for f in formulas:
        witness = None
        checked = 0
        for model in models:
            memo = _Memo()
            stop = False
            for member in model.team:
                checked += 1
                if not _eval(model, member, f, mode, memo):
                    witness = PointedModel(model, member)
                    stop = True
                    break
            if stop:
                break
        results.append(ValidityResult(witness is None, witness, checked))
    return results


# ---------------------------------------------------------------------------
# formula sampling

DEFAULT_WEIGHTS = {
    "atom": 3,
    "not": 2,
    "and": 2,
    "box": 3,
    "know": 2,
    "announce": 1,
}

_FRAGMENT_CONNECTIVES = {
    FragmentTag.LC: ("not", "and", "box"),
    FragmentTag.LKC: ("not", "and", "box", "know"),
    FragmentTag.LPAKC: ("not", "and", "box", "know", "announce"),
    FragmentTag.LCp: ("not", "and"),
    FragmentTag.LKCp: ("not", "and", "know"),
    FragmentTag.LPAKCp: ("not", "and", "know", "announce"),
}

_PRIMED = (FragmentTag.LCp, FragmentTag.LKCp, FragmentTag.LPAKCp)


def _random_assignment(rng: random.Random, signature: Signature, max_vars=None) -> Assignment:
    limit = len(signature.order) if max_vars is None else min(max_vars, len(signature.order))
    k = rng.randint(0, limit)
    vars_ = sorted(rng.sample(signature.order, k), key=signature.positions.__getitem__)
    return Assignment(tuple((v, rng.choice(signature.ranges[v])) for v in vars_))


def sample_formulas(
    signature: Signature,
    depth: int,
    count: int,
    seed: int,
    fragment_tag: FragmentTag = FragmentTag.LPAKC,
    weights: Optional[dict] = None,
) -> list[Formula]:
    """Deterministic bound formulas inside the requested fragment."""
    if depth < 1:
        raise EclogicError("sampling needs depth >= 1")
    rng = random.Random(seed)
    weights = dict(DEFAULT_WEIGHTS, **(weights or {}))
    connectives = _FRAGMENT_CONNECTIVES[fragment_tag]
    primed = fragment_tag in _PRIMED

    def leaf() -> Formula:
        var = rng.choice(signature.order)
        atom = Atom(var, rng.choice(signature.ranges[var]))
        if primed:
            return Intervene(_random_assignment(rng, signature, max_vars=2), atom)
        return atom

    def gen(d: int) -> Formula:
        if d <= 0:
            return leaf()
        options = ["atom"] + list(connectives)
        total = sum(weights[o] for o in options)
        pick = rng.randrange(total)
        for option in options:
            pick -= weights[option]
            if pick < 0:
                break
        if option == "atom":
            return leaf()
        if option == "not":
            return Not(gen(d - 1))
        if option == "and":
            return And(gen(d - 1), gen(d - 1))
        if option == "box":
            return Intervene(_random_assignment(rng, signature, max_vars=2), gen(d - 1))
        if option == "know":
            return Know(gen(d - 1))
        return Announce(gen(d - 1), gen(d - 1))

    return [gen(depth) for _ in range(count)]


# ---------------------------------------------------------------------------
# observable-constancy equivalence audit


def all_assignments(signature: Signature) -> Iterator[Assignment]:
    """Every assignment over the signature (including the empty one)."""
    choices = [
        [None] + list(signature.ranges[v]) for v in signature.order
    ]
    for values in itertools.product(*choices):
        pairs = tuple(
            (v, val) for v, val in zip(signature.order, values) if val is not None
        )
        yield Assignment(pairs)


def satisfies_observable_constancy(model: EpistemicModel) -> bool:
    """True iff every intervention leaves the team constant on the
    observables: the semantic content of the constant-observables axiom
    scheme over the whole assignment space."""
    sig = model.signature
    obs_pos = tuple(sig.positions[o] for o in sig.observables)
    if not obs_pos:
        return True
    for asg in all_assignments(sig):
        intervened = sorted(
            {intervene_causal(model.functions, member, asg)[1] for member in model.team}
        )
        first = intervened[0]
        if any(m[p] != first[p] for m in intervened for p in obs_pos):
            return False
    return True


@dataclass
class OcAuditReport:
    models_audited: int = 0
    models_skipped: int = 0
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        return (
            f"{self.models_audited} models audited, {self.models_skipped} skipped, "
            f"{self.checks} checks, {len(self.violations)} violations"
        )


def oc_equivalence_audit(
    signature: Signature,
    caps: EnumerationCaps = EnumerationCaps(),
    formula_count: int = 200,
) -> OcAuditReport:
    """On every enumerated model that keeps its observables constant under
    all interventions, the plain and the observables semantics must agree
    on every sampled formula at every point."""
    report = OcAuditReport()
    formulas = [
        bind(f, signature)
        for f in sample_formulas(
            signature, caps.formula_depth, formula_count, caps.seed, FragmentTag.LPAKC
        )
    ]
    for model in enumerate_models(signature, caps, SemanticsMode.EPISTEMIC_W):
        if not satisfies_observable_constancy(model):
            report.models_skipped += 1
            continue
        report.models_audited += 1
        for member in model.team:
            pointed = PointedModel(model, member)
            for f in formulas:
                report.checks += 1
                w = evaluate(pointed, f, SemanticsMode.EPISTEMIC_W, assume_bound=True)
                o = evaluate(pointed, f, SemanticsMode.OBSERVABLES_O, assume_bound=True)
                if w != o:
                    report.violations.append((pointed, f))
    return report
