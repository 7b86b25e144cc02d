import random

import pytest

from eclogic.epistemic import (
    EpistemicModel,
    PointedModel,
    SemanticsMode,
    announce,
    evaluate,
    intervene_observable,
    intervene_team,
    known_values,
)
from eclogic.errors import EclogicError, ModelValidationError
from eclogic.syntax import (
    And,
    Announce,
    Assignment,
    Atom,
    Intervene,
    Know,
    Not,
    bind,
    or_list,
    parse,
)

from conftest import flashlight_pointed, random_formula

W = SemanticsMode.EPISTEMIC_W
O = SemanticsMode.OBSERVABLES_O
SINGLE = SemanticsMode.SINGLE_CAUSAL


def team_dicts(model):
    return [model.signature.valuation_to_dict(m) for m in model.team]


class TestInterveneTeam:
    def test_flashlight_push(self, pointed_flash):
        pushed = intervene_team(pointed_flash.model, Assignment((("P", "1"),)))
        assert team_dicts(pushed) == [
            {"P": "1", "B": "0", "L": "0"},
            {"P": "1", "B": "1", "L": "1"},
        ]

    def test_empty_assignment_identity(self, pointed_flash):
        assert intervene_team(pointed_flash.model, Assignment(())) == pointed_flash.model

    def test_deduplication(self, pointed_flash):
        drained = intervene_team(pointed_flash.model, Assignment((("B", "0"),)))
        assert team_dicts(drained) == [{"P": "0", "B": "0", "L": "0"}]


class TestAnnounce:
    def test_counterfactual_announcement(self, pointed_flash):
        alpha = parse("[P=1] L=0", pointed_flash.model.signature)
        updated = announce(pointed_flash.model, pointed_flash.actual, alpha, W)
        assert team_dicts(updated) == [{"P": "0", "B": "0", "L": "0"}]

    def test_tautology_keeps_team(self, pointed_flash):
        sig = pointed_flash.model.signature
        alpha = bind(or_list([Atom("B", "1"), Not(Atom("B", "1"))]), sig)
        updated = announce(pointed_flash.model, pointed_flash.actual, alpha, W)
        assert updated == pointed_flash.model

    def test_atom_announcement_at_other_point(self, pointed_flash):
        sig = pointed_flash.model.signature
        a2 = sig.valuation_of({"P": "0", "B": "1", "L": "0"})
        updated = announce(pointed_flash.model, a2, Atom("B", "1"), W)
        assert team_dicts(updated) == [{"P": "0", "B": "1", "L": "0"}]

    def test_false_announcement_rejected(self, pointed_flash):
        with pytest.raises(EclogicError):
            announce(pointed_flash.model, pointed_flash.actual, Atom("B", "1"), W)

    def test_team_monotone(self, pointed_flash):
        alpha = parse("[P=1] L=0", pointed_flash.model.signature)
        updated = announce(pointed_flash.model, pointed_flash.actual, alpha, W)
        assert set(updated.team) <= set(pointed_flash.model.team)


class TestInterveneObservable:
    def test_flashlight_experiment(self, pointed_flash_obs):
        model, actual = intervene_observable(
            pointed_flash_obs.model, pointed_flash_obs.actual, Assignment((("P", "1"),))
        )
        assert team_dicts(model) == [{"P": "1", "B": "0", "L": "0"}]
        assert model.signature.valuation_to_dict(actual) == {"P": "1", "B": "0", "L": "0"}
        assert model.is_observable_constant()

    def test_from_charged_actual(self, pointed_flash_obs):
        sig = pointed_flash_obs.model.signature
        a2 = sig.valuation_of({"P": "0", "B": "1", "L": "0"})
        model, actual = intervene_observable(
            pointed_flash_obs.model, a2, Assignment((("P", "1"),))
        )
        assert team_dicts(model) == [{"P": "1", "B": "1", "L": "1"}]
        assert sig.valuation_to_dict(actual) == {"P": "1", "B": "1", "L": "1"}

    def test_no_observables_matches_plain_intervention(self, pointed_flash):
        asg = Assignment((("P", "1"),))
        model, _ = intervene_observable(pointed_flash.model, pointed_flash.actual, asg)
        assert model == intervene_team(pointed_flash.model, asg)


class TestEvaluateFlashlight:
    def test_counterfactual_true(self, pointed_flash):
        f = parse("[P=1] L=0", pointed_flash.model.signature)
        assert evaluate(pointed_flash, f, W) is True

    def test_knowledge_of_counterfactual_false(self, pointed_flash):
        f = parse("K [P=1] L=0", pointed_flash.model.signature)
        assert evaluate(pointed_flash, f, W) is False

    def test_learning_from_announcement(self, pointed_flash):
        f = parse("[[P=1] L=0 !] K B=0", pointed_flash.model.signature)
        assert evaluate(pointed_flash, f, W) is True

    def test_experiment_teaches_battery_state(self, pointed_flash_obs):
        f = parse("[P=1] K B=0", pointed_flash_obs.model.signature)
        assert evaluate(pointed_flash_obs, f, O) is True

    def test_thought_experiment_does_not(self, pointed_flash_obs):
        f = parse("K [P=1] B=0", pointed_flash_obs.model.signature)
        assert evaluate(pointed_flash_obs, f, O) is False

    def test_no_learning_fails_under_observables(self, pointed_flash_obs):
        sig = pointed_flash_obs.model.signature
        nl = parse("[P=1] K B=0 -> K [P=1] B=0", sig)
        assert evaluate(pointed_flash_obs, nl, O) is False

    def test_single_mode_rejects_k(self, pointed_flash):
        with pytest.raises(EclogicError):
            evaluate(pointed_flash, Know(Atom("B", "0")), SINGLE)
        with pytest.raises(EclogicError):
            evaluate(pointed_flash, Announce(Atom("B", "0"), Atom("B", "0")), SINGLE)

    def test_obs_mode_needs_constant_team(self):
        pointed = flashlight_pointed(observables=("B",))
        # construction succeeds; only evaluation under obs-semantics rejects
        with pytest.raises(ModelValidationError):
            evaluate(pointed, Atom("B", "0"), O)


class TestSampledLaws:
    def enumerate_assignments(self, sig, rng):
        vars_ = rng.sample(sig.order, rng.randint(0, len(sig.order)))
        return Assignment(tuple((v, rng.choice(sig.ranges[v])) for v in vars_))

    def points(self, pointed):
        return [PointedModel(pointed.model, member) for member in pointed.model.team]

    def test_w_equals_o_with_empty_observables(self, pointed_flash):
        rng = random.Random(11)
        for _ in range(120):
            f = bind(random_formula(rng, pointed_flash.model.signature, 4),
                     pointed_flash.model.signature)
            for point in self.points(pointed_flash):
                assert evaluate(point, f, W) == evaluate(point, f, O)

    def test_announcement_idempotence(self, pointed_flash):
        sig = pointed_flash.model.signature
        rng = random.Random(12)
        for _ in range(80):
            alpha = bind(random_formula(rng, sig, 2), sig)
            chi = bind(random_formula(rng, sig, 2), sig)
            lhs = Announce(alpha, Announce(alpha, chi))
            rhs = Announce(And(alpha, Announce(alpha, alpha)), chi)
            for point in self.points(pointed_flash):
                assert evaluate(point, lhs, W) == evaluate(point, rhs, W)

    def test_intervention_announcement_commutation(self, pointed_flash):
        sig = pointed_flash.model.signature
        rng = random.Random(13)
        for _ in range(80):
            asg = self.enumerate_assignments(sig, rng)
            alpha = bind(random_formula(rng, sig, 2), sig)
            chi = bind(random_formula(rng, sig, 2), sig)
            lhs = Intervene(asg, Announce(alpha, chi))
            rhs = Announce(Intervene(asg, alpha), Intervene(asg, chi))
            for point in self.points(pointed_flash):
                assert evaluate(point, lhs, W) == evaluate(point, rhs, W)

    def test_cm_biconditional_under_w(self, pointed_flash):
        sig = pointed_flash.model.signature
        rng = random.Random(14)
        for _ in range(80):
            asg = self.enumerate_assignments(sig, rng)
            xi = bind(random_formula(rng, sig, 2, allow=("K",)), sig)
            lhs = Intervene(asg, Know(xi))
            rhs = Know(Intervene(asg, xi))
            for point in self.points(pointed_flash):
                assert evaluate(point, lhs, W) == evaluate(point, rhs, W)

    def test_perfect_recall_under_obs(self, pointed_flash_obs):
        sig = pointed_flash_obs.model.signature
        rng = random.Random(15)
        for _ in range(80):
            asg = self.enumerate_assignments(sig, rng)
            psi = bind(random_formula(rng, sig, 2), sig)
            antecedent = Know(Intervene(asg, psi))
            consequent = Intervene(asg, Know(psi))
            for point in self.points(pointed_flash_obs):
                assert (not evaluate(point, antecedent, O)) or evaluate(point, consequent, O)

    def test_observable_constancy_preserved(self, pointed_flash_obs):
        sig = pointed_flash_obs.model.signature
        rng = random.Random(16)
        for _ in range(60):
            asg = self.enumerate_assignments(sig, rng)
            model, actual = intervene_observable(
                pointed_flash_obs.model, pointed_flash_obs.actual, asg
            )
            assert model.is_observable_constant()
            alpha = bind(random_formula(rng, sig, 2), sig)
            if evaluate(PointedModel(model, actual), alpha, O):
                updated = announce(model, actual, alpha, O)
                assert updated.is_observable_constant()
                assert set(updated.team) <= set(model.team)


class TestKnownValues:
    def test_initial_flashlight(self, pointed_flash):
        assert known_values(pointed_flash.model) == {"P": "0", "L": "0"}

    def test_after_experiment(self, pointed_flash_obs):
        model, _ = intervene_observable(
            pointed_flash_obs.model, pointed_flash_obs.actual, Assignment((("P", "1"),))
        )
        assert known_values(model) == {"P": "1", "B": "0", "L": "0"}

    def test_matches_knowledge_modality(self, pointed_flash):
        model = pointed_flash.model
        sig = model.signature
        for var in sig.order:
            for value in sig.ranges[var]:
                knows = evaluate(pointed_flash, Know(Atom(var, value)), W)
                assert knows == (known_values(model).get(var) == value)


class TestModelInvariants:
    def test_rejects_empty_team(self, pointed_flash):
        with pytest.raises(ModelValidationError):
            EpistemicModel(pointed_flash.model.signature, pointed_flash.model.functions, [])

    def test_rejects_duplicates(self, pointed_flash):
        member = pointed_flash.actual
        with pytest.raises(ModelValidationError):
            EpistemicModel(
                pointed_flash.model.signature,
                pointed_flash.model.functions,
                [member, member],
            )

    def test_rejects_non_compliant_member(self, pointed_flash):
        sig = pointed_flash.model.signature
        bad = sig.valuation_of({"P": "1", "B": "1", "L": "0"})
        with pytest.raises(ModelValidationError):
            EpistemicModel(sig, pointed_flash.model.functions, [bad])

    def test_actual_must_be_in_team(self, pointed_flash):
        sig = pointed_flash.model.signature
        outside = sig.valuation_of({"P": "1", "B": "1", "L": "1"})
        with pytest.raises(ModelValidationError):
            PointedModel(pointed_flash.model, outside)
