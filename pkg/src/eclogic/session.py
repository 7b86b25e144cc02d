"""Interactive experiment session: stepwise interventions and announcements
against a loaded model, with full undo history.

Every state on the history stack is a valid pointed model; undo restores the
prior state bit-exactly.  Announcing a formula that is false at the actual
world is refused and leaves the state untouched.
"""

from __future__ import annotations

from typing import Optional

from .epistemic import (
    EpistemicModel,
    PointedModel,
    SemanticsMode,
    evaluate,
    intervene_observable,
    intervene_team,
    known_values,
)
from .errors import EclogicError
from .models import intervene_causal
from .syntax import Assignment, Formula, parse, to_text


class Session:
    def __init__(self, pointed: PointedModel, mode: SemanticsMode):
        if mode is SemanticsMode.SINGLE_CAUSAL:
            raise EclogicError("sessions run under the epistemic or observables semantics")
        if mode is SemanticsMode.OBSERVABLES_O and not pointed.model.signature.observables:
            raise EclogicError("observables mode needs observables in the model")
        self.mode = mode
        self._initial = pointed
        self.current = pointed
        self.history: list[tuple[dict, PointedModel]] = []

    @property
    def signature(self):
        return self.current.model.signature

    # -- state rendering ----------------------------------------------------

    def state(self) -> dict:
        sig = self.signature
        model = self.current.model
        return {
            "mode": self.mode.value,
            "variables": list(sig.order),
            "ranges": {v: list(sig.ranges[v]) for v in sig.order},
            "observables": list(sig.observables),
            "team": [sig.valuation_to_dict(m) for m in model.team],
            "actual": sig.valuation_to_dict(self.current.actual),
            "known_values": known_values(model),
            "history_depth": len(self.history),
            "graph": self.graph(),
        }

    def graph(self) -> list[list[str]]:
        sig = self.signature
        graph = self.current.model.functions.graph()
        return [
            [src, dst]
            for src, dst in sorted(
                graph.edges, key=lambda e: (sig.positions[e[0]], sig.positions[e[1]])
            )
        ]

    def _observe(self, status: str, action: dict, **extra) -> dict:
        out = {"status": status, "action": action}
        out.update(extra)
        out.update(self.state())
        return out

    # -- actions ------------------------------------------------------------

    def step(self, action: dict) -> dict:
        kind = action.get("type")
        try:
            if kind == "intervene":
                return self._intervene(action)
            if kind == "announce":
                return self._announce(action)
            if kind == "evaluate":
                return self._evaluate(action)
            if kind == "undo":
                return self.undo(action)
            if kind == "reset":
                return self.reset(action)
        except EclogicError as exc:
            return self._observe("error", action, message=str(exc))
        return self._observe("error", action, message=f"unknown action type {kind!r}")

    def _parse_formula(self, action: dict) -> Formula:
        text = action.get("formula")
        if not isinstance(text, str):
            raise EclogicError("action needs a formula string")
        return parse(text, self.signature)

    def _intervene(self, action: dict) -> dict:
        mapping = action.get("assignment")
        if not isinstance(mapping, dict):
            raise EclogicError("intervene needs an assignment object")
        asg = self.signature.sort_assignment(Assignment.of(mapping))
        for var, value in asg.pairs:
            if var not in self.signature.positions:
                raise EclogicError(f"unknown variable {var!r}")
            if value not in self.signature.ranges[var]:
                raise EclogicError(f"value {value!r} not in range of {var!r}")
        model, actual = self.current.model, self.current.actual
        if self.mode is SemanticsMode.OBSERVABLES_O:
            new_model, new_actual = intervene_observable(model, actual, asg)
        else:
            new_model = intervene_team(model, asg)
            _, new_actual = intervene_causal(model.functions, actual, asg)
        self.history.append((action, self.current))
        self.current = PointedModel(new_model, new_actual)
        return self._observe("ok", action)

    def _announce(self, action: dict) -> dict:
        alpha = self._parse_formula(action)
        if not evaluate(self.current, alpha, self.mode, assume_bound=True):
            return self._observe(
                "refused", action, message="announcement is false at the actual world"
            )
        team = tuple(
            member
            for member in self.current.model.team
            if evaluate(
                PointedModel(self.current.model, member), alpha, self.mode,
                assume_bound=True,
            )
        )
        new_model = EpistemicModel(
            self.signature, self.current.model.functions, team, _trusted=True
        )
        self.history.append((action, self.current))
        self.current = PointedModel(new_model, self.current.actual)
        return self._observe("ok", action)

    def _evaluate(self, action: dict) -> dict:
        f = self._parse_formula(action)
        result = evaluate(self.current, f, self.mode, assume_bound=True)
        return self._observe("ok", action, result=result, formula=to_text(f))

    def undo(self, action: Optional[dict] = None) -> dict:
        action = action or {"type": "undo"}
        if not self.history:
            return self._observe("refused", action, message="history is empty")
        _, self.current = self.history.pop()
        return self._observe("ok", action)

    def reset(self, action: Optional[dict] = None) -> dict:
        action = action or {"type": "reset"}
        self.history.clear()
        self.current = self._initial
        return self._observe("ok", action)
