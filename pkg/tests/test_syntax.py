import random

import pytest

from eclogic.errors import BindingError, FormulaSyntaxError, FragmentError
from eclogic.syntax import (
    EMPTY_ASSIGNMENT,
    And,
    Announce,
    Assignment,
    Atom,
    FragmentTag,
    Intervene,
    Know,
    Measure,
    Not,
    as_iff,
    as_implies,
    bind,
    complexity,
    fragment,
    iff,
    implies,
    or_list,
    parse,
    parse_unbound,
    subformulas,
    to_text,
)

from conftest import random_formula


class TestParse:
    def test_counterfactual(self, sig_flash):
        f = parse("[P=1] L=0", sig_flash)
        assert f == Intervene(Assignment((("P", "1"),)), Atom("L", "0"))

    def test_empty_intervention(self, sig_flash):
        assert parse("[] B=0", sig_flash) == Intervene(EMPTY_ASSIGNMENT, Atom("B", "0"))

    def test_announcement_of_counterfactual(self, sig_flash):
        f = parse("[[P=1] L=0 !] K B=0", sig_flash)
        assert f == Announce(
            Intervene(Assignment((("P", "1"),)), Atom("L", "0")),
            Know(Atom("B", "0")),
        )

    def test_sugar_desugars(self, sig_flash):
        assert parse("P=1 -> B=0", sig_flash) == implies(Atom("P", "1"), Atom("B", "0"))
        assert parse("P=1 | B=0", sig_flash) == or_list([Atom("P", "1"), Atom("B", "0")])
        assert parse("P=0 & B=0 & L=0", sig_flash) == And(
            And(Atom("P", "0"), Atom("B", "0")), Atom("L", "0")
        )

    def test_implication_right_associates(self, sig_flash):
        assert parse("P=1 -> B=1 -> L=1", sig_flash) == implies(
            Atom("P", "1"), implies(Atom("B", "1"), Atom("L", "1"))
        )

    def test_assignment_canonical_order(self, sig_flash):
        f = parse("[L=0, P=1] B=0", sig_flash)
        assert f.assignment.pairs == (("P", "1"), ("L", "0"))

    def test_syntax_error_carries_position(self, sig_flash):
        with pytest.raises(FormulaSyntaxError) as err:
            parse("[P=1 L=0", sig_flash)
        assert err.value.position >= 0

    def test_unknown_variable(self, sig_flash):
        with pytest.raises(BindingError):
            parse("Q=1", sig_flash)

    def test_value_outside_range(self, sig_flash):
        with pytest.raises(BindingError):
            parse("P=2", sig_flash)

    def test_duplicate_intervention_variable(self, sig_flash):
        with pytest.raises(FormulaSyntaxError):
            parse("[P=1, P=0] L=0", sig_flash)

    def test_k_named_variable_still_parses(self):
        from eclogic.models import Signature

        sig = Signature(["K"], [], {"K": ("0", "1")})
        assert parse("K=1", sig) == Atom("K", "1")
        assert parse("K K=1", sig) == Know(Atom("K", "1"))


class TestPrint:
    def test_examples(self):
        assert to_text(Intervene(EMPTY_ASSIGNMENT, Atom("B", "0"))) == "[] B=0"
        assert to_text(Know(Atom("B", "1"))) == "K B=1"
        nested = Announce(
            Intervene(Assignment((("P", "1"),)), Atom("L", "0")), Know(Atom("B", "0"))
        )
        assert to_text(nested) == "[[P=1] L=0 !] K B=0"

    def test_round_trip_depth6(self, sig_flash):
        rng = random.Random(20240311)
        for _ in range(400):
            f = bind(random_formula(rng, sig_flash, depth=6), sig_flash)
            assert parse(to_text(f), sig_flash) == f

    def test_right_nested_and_keeps_shape(self, sig_flash):
        f = And(Atom("P", "0"), And(Atom("B", "0"), Atom("L", "0")))
        assert parse(to_text(f), sig_flash) == f


class TestFragment:
    def test_bare_atom(self):
        tags = fragment(Atom("Y", "0"))
        assert tags == {FragmentTag.LC, FragmentTag.LKC, FragmentTag.LPAKC}

    def test_boxed_atom_in_all_six(self):
        f = Intervene(Assignment((("X", "0"),)), Atom("Y", "0"))
        assert fragment(f) == set(FragmentTag)

    def test_announce_with_plain_atom_argument(self):
        f = Announce(Atom("Y", "0"), Know(Atom("Z", "0")))
        assert fragment(f) == {FragmentTag.LPAKC}

    def test_inclusions_hold_on_random_formulas(self, sig_flash):
        rng = random.Random(7)
        inclusions = [
            (FragmentTag.LCp, FragmentTag.LC),
            (FragmentTag.LCp, FragmentTag.LKCp),
            (FragmentTag.LKCp, FragmentTag.LKC),
            (FragmentTag.LKCp, FragmentTag.LPAKCp),
            (FragmentTag.LC, FragmentTag.LKC),
            (FragmentTag.LKC, FragmentTag.LPAKC),
            (FragmentTag.LPAKCp, FragmentTag.LPAKC),
        ]
        for _ in range(300):
            tags = fragment(random_formula(rng, sig_flash, depth=4))
            for small, big in inclusions:
                assert small not in tags or big in tags


class TestComplexity:
    def test_atom_is_one(self):
        assert complexity(Atom("Y", "0"), Measure.C) == 1

    def test_box_negation_order_matters(self):
        box_neg = Intervene(Assignment((("X", "0"),)), Not(Atom("Y", "0")))
        neg_box = Not(Intervene(Assignment((("X", "0"),)), Atom("Y", "0")))
        assert complexity(box_neg, Measure.C) == 4
        assert complexity(neg_box, Measure.C) == 3

    def test_announcement_weight(self):
        f = Announce(Atom("Y", "0"), Atom("Z", "0"))
        assert complexity(f, Measure.PAKC) == 8

    def test_measure_c_rejects_k(self):
        with pytest.raises(FragmentError):
            complexity(Know(Atom("Y", "0")), Measure.C)

    def test_measure_kc_rejects_announcement(self):
        with pytest.raises(FragmentError):
            complexity(Announce(Atom("Y", "0"), Atom("Y", "0")), Measure.KC)

    def test_pakcp_unit_is_boxed_atom(self):
        boxed = Intervene(Assignment((("X", "0"),)), Atom("Y", "0"))
        assert complexity(boxed, Measure.PAKCp) == 1
        with pytest.raises(FragmentError):
            complexity(Atom("Y", "0"), Measure.PAKCp)

    def test_subformulas_never_heavier(self, sig_flash):
        rng = random.Random(99)
        cases = [(Measure.C, ()), (Measure.KC, ("K",)), (Measure.PAKC, ("K", "!"))]
        for measure, allow in cases:
            for _ in range(150):
                g = random_formula(rng, sig_flash, depth=4, allow=allow)
                for sub in subformulas(g):
                    assert complexity(sub, measure) <= complexity(g, measure)


class TestSugarHelpers:
    def test_as_implies_inverts_builder(self):
        a, b = Atom("P", "1"), Atom("B", "0")
        assert as_implies(implies(a, b)) == (a, b)
        assert as_implies(And(a, b)) is None

    def test_as_iff_inverts_builder(self):
        a, b = Atom("P", "1"), Atom("B", "0")
        assert as_iff(iff(a, b)) == (a, b)
        assert as_iff(And(implies(a, b), implies(a, b))) is None

    def test_unbound_parse_keeps_source_order(self):
        f = parse_unbound("[L=0, P=1] B=0")
        assert f.assignment.pairs == (("L", "0"), ("P", "1"))

    def test_assignment_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Assignment((("X", "0"), ("X", "1")))
