"""Epistemic causal models (teams) and the three satisfaction relations.

Modes:

* ``SINGLE_CAUSAL`` evaluates K-free, announcement-free formulas on the
  actual valuation alone.
* ``EPISTEMIC_W`` intervenes the whole team uniformly.
* ``OBSERVABLES_O`` additionally filters the intervened team to the members
  that agree with the intervened actual world on every observable, so the
  experimenter learns what the measured variables show.

Updated models are built fresh inside each top-level evaluation (the
observables update depends on the evaluation point, so caching keyed on the
model alone would be unsound); a per-call memo avoids recomputing the same
update for the same point within one evaluation.
"""

from __future__ import annotations

import enum
from typing import Optional

from .errors import EclogicError, ModelValidationError
from .syntax import (
    And,
    Announce,
    Assignment,
    Atom,
    Formula,
    Intervene,
    Know,
    Not,
)
from .models import FunctionSet, Signature, Valuation, intervene_causal, is_recursive


class SemanticsMode(enum.Enum):
    SINGLE_CAUSAL = "single"
    EPISTEMIC_W = "epistemic"
    OBSERVABLES_O = "obs"


class EpistemicModel:
    """A recursive function set plus a non-empty duplicate-free team."""

    def __init__(self, signature: Signature, functions: FunctionSet, team, *, _trusted=False):
        self.signature = signature
        self.functions = functions
        if _trusted:
            self.team = team
        else:
            members = list(team)
            if not members:
                raise ModelValidationError("team must be non-empty")
            if len(set(members)) != len(members):
                raise ModelValidationError("team contains duplicate valuations")
            if functions.signature != signature:
                raise ModelValidationError("function set belongs to another signature")
            if not is_recursive(functions):
                raise ModelValidationError("structural functions are not recursive")
            for member in members:
                if not functions.complies(member):
                    raise ModelValidationError(
                        f"team member {signature.valuation_to_dict(member)} "
                        "does not comply with the structural functions"
                    )
            self.team = tuple(sorted(members))
        self._obs_pos = tuple(signature.positions[o] for o in signature.observables)
        self._key = (functions._key, self.team)
        self._hash = hash(self._key)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EpistemicModel)
            and self.signature == other.signature
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"EpistemicModel(|team|={len(self.team)})"

    def is_observable_constant(self) -> bool:
        if not self._obs_pos:
            return True
        first = self.team[0]
        return all(
            all(member[p] == first[p] for p in self._obs_pos) for member in self.team
        )

    def _replace_team(self, team) -> "EpistemicModel":
        return EpistemicModel(self.signature, self.functions, team, _trusted=True)


class PointedModel:
    """An epistemic model with a designated actual world from its team."""

    def __init__(self, model: EpistemicModel, actual: Valuation):
        if actual not in model.team:
            raise ModelValidationError("actual valuation must belong to the team")
        self.model = model
        self.actual = actual

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PointedModel)
            and self.model == other.model
            and self.actual == other.actual
        )

    def __hash__(self) -> int:
        return hash((self.model, self.actual))


def intervene_team(model: EpistemicModel, asg: Assignment) -> EpistemicModel:
    """Intervene every team member uniformly; duplicates collapse."""
    from .models import apply_intervention, intervened_functions

    sig = model.signature
    new_functions = intervened_functions(model.functions, asg)
    graph = new_functions.graph()
    pairs = sig.assignment_indices(asg)
    new_team = sorted(
        {apply_intervention(new_functions, graph, member, pairs) for member in model.team}
    )
    return EpistemicModel(sig, new_functions, tuple(new_team), _trusted=True)


def intervene_observable(
    model: EpistemicModel, actual: Valuation, asg: Assignment
) -> tuple[EpistemicModel, Valuation]:
    """Intervene the team, then keep the members matching the intervened
    actual world on every observable."""
    if actual not in model.team:
        raise ModelValidationError("actual valuation must belong to the team")
    from .models import apply_intervention

    intervened = intervene_team(model, asg)
    new_actual = apply_intervention(
        intervened.functions,
        intervened.functions.graph(),
        actual,
        model.signature.assignment_indices(asg),
    )
    obs = model._obs_pos
    team = tuple(
        member
        for member in intervened.team
        if all(member[p] == new_actual[p] for p in obs)
    )
    return intervened._replace_team(team), new_actual


def announce(
    model: EpistemicModel,
    actual: Valuation,
    alpha: Formula,
    mode: SemanticsMode,
) -> EpistemicModel:
    """Filter the team to the worlds where alpha holds (alpha must hold at
    the actual world; evaluate() handles the vacuous branch itself)."""
    if not evaluate(PointedModel(model, actual), alpha, mode):
        raise EclogicError("announced formula is false at the actual world")
    memo = _Memo()
    team = _filtered_team(model, alpha, mode, memo)
    return model._replace_team(team)


class _Memo:
    """Per-evaluation cache of model updates (sound within a single call)."""

    __slots__ = ("interventions", "observations", "filters", "trace")

    def __init__(self, trace=None):
        self.interventions: dict = {}
        self.observations: dict = {}
        self.filters: dict = {}
        self.trace = trace


def _filtered_team(model, alpha, mode, memo):
    key = (model, id(alpha))
    team = memo.filters.get(key)
    if team is None:
        team = tuple(
            member for member in model.team if _eval(model, member, alpha, mode, memo)
        )
        memo.filters[key] = team
    return team


def _eval(model, actual, f, mode, memo, depth: int = 0) -> bool:
    if isinstance(f, Atom):
        sig = model.signature
        return actual[sig.positions[f.variable]] == sig.value_index[f.variable][f.value]
    if isinstance(f, Not):
        return not _eval(model, actual, f.sub, mode, memo, depth)
    if isinstance(f, And):
        return _eval(model, actual, f.left, mode, memo, depth) and _eval(
            model, actual, f.right, mode, memo, depth
        )
    if isinstance(f, Know):
        return all(
            _eval(model, member, f.sub, mode, memo, depth) for member in model.team
        )
    if isinstance(f, Intervene):
        if mode is SemanticsMode.OBSERVABLES_O:
            key = (model, actual, f.assignment)
            hit = memo.observations.get(key)
            if hit is None:
                hit = intervene_observable(model, actual, f.assignment)
                memo.observations[key] = hit
            new_model, new_actual = hit
        else:
            from .models import apply_intervention

            key = (model, f.assignment)
            hit = memo.interventions.get(key)
            if hit is None:
                new_model = intervene_team(model, f.assignment)
                hit = (
                    new_model,
                    new_model.functions.graph(),
                    model.signature.assignment_indices(f.assignment),
                )
                memo.interventions[key] = hit
            new_model, graph, pairs = hit
            new_actual = apply_intervention(new_model.functions, graph, actual, pairs)
        if memo.trace is not None:
            memo.trace.append(
                {
                    "depth": depth,
                    "op": "intervene",
                    "detail": str(f.assignment),
                    "team_before": len(model.team),
                    "team_after": len(new_model.team),
                }
            )
        return _eval(new_model, new_actual, f.sub, mode, memo, depth + 1)
    if isinstance(f, Announce):
        from .syntax import to_text

        if not _eval(model, actual, f.alpha, mode, memo, depth):
            if memo.trace is not None:
                memo.trace.append(
                    {
                        "depth": depth,
                        "op": "announce-vacuous",
                        "detail": to_text(f.alpha),
                        "team_before": len(model.team),
                        "team_after": len(model.team),
                    }
                )
            return True
        team = _filtered_team(model, f.alpha, mode, memo)
        if memo.trace is not None:
            memo.trace.append(
                {
                    "depth": depth,
                    "op": "announce",
                    "detail": to_text(f.alpha),
                    "team_before": len(model.team),
                    "team_after": len(team),
                }
            )
        return _eval(model._replace_team(team), actual, f.sub, mode, memo, depth + 1)
    raise TypeError(f"not a formula: {f!r}")


def _eval_single(functions: FunctionSet, actual: Valuation, f: Formula) -> bool:
    sig = functions.signature
    if isinstance(f, Atom):
        return actual[sig.positions[f.variable]] == sig.value_index[f.variable][f.value]
    if isinstance(f, Not):
        return not _eval_single(functions, actual, f.sub)
    if isinstance(f, And):
        return _eval_single(functions, actual, f.left) and _eval_single(
            functions, actual, f.right
        )
    if isinstance(f, Intervene):
        new_functions, new_actual = intervene_causal(functions, actual, f.assignment)
        return _eval_single(new_functions, new_actual, f.sub)
    if isinstance(f, (Know, Announce)):
        raise EclogicError("K and announcements are undefined in single-model semantics")
    raise TypeError(f"not a formula: {f!r}")


def evaluate(
    pointed: PointedModel,
    f: Formula,
    mode: SemanticsMode,
    *,
    assume_bound: bool = False,
    trace: Optional[list] = None,
) -> bool:
    """Truth of f at the pointed model under the selected relation.

    Binding (name validation plus canonical assignment order) happens here
    unless the caller asserts it already did it; sweeps bind once and reuse.
    A list passed as ``trace`` collects one entry per model update (team
    sizes before and after each box).
    """
    from .syntax import bind

    if not assume_bound:
        f = bind(f, pointed.model.signature)
    if mode is SemanticsMode.SINGLE_CAUSAL:
        return _eval_single(pointed.model.functions, pointed.actual, f)
    if mode is SemanticsMode.OBSERVABLES_O and not pointed.model.is_observable_constant():
        raise ModelValidationError(
            "observables semantics needs a team constant on every observable"
        )
    return _eval(pointed.model, pointed.actual, f, mode, _Memo(trace))


def known_values(model: EpistemicModel) -> dict[str, str]:
    """Variables whose value is constant across the team, with that value."""
    sig = model.signature
    out = {}
    first = model.team[0]
    for var in sig.order:
        pos = sig.positions[var]
        if all(member[pos] == first[pos] for member in model.team):
            out[var] = sig.ranges[var][first[pos]]
    return out
