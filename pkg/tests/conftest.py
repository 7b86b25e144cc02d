import random

import pytest

from eclogic.epistemic import EpistemicModel, PointedModel
from eclogic.models import FunctionSet, Signature
from eclogic.syntax import (
    And,
    Announce,
    Assignment,
    Atom,
    Intervene,
    Know,
    Not,
)

BIN = ("0", "1")


def flashlight_signature(observables=()):
    return Signature(
        exogenous=["P", "B"],
        endogenous=["L"],
        ranges={"P": BIN, "B": BIN, "L": BIN},
        observables=observables,
    )


def flashlight_functions(sig):
    # L is on exactly when both the button is pushed and the battery is full
    table = {(p, b): int(p == 1 and b == 1) for p in (0, 1) for b in (0, 1)}
    return FunctionSet(sig, {"L": (("P", "B"), table)})


def flashlight_pointed(observables=()):
    sig = flashlight_signature(observables)
    fns = flashlight_functions(sig)
    a1 = sig.valuation_of({"P": "0", "B": "0", "L": "0"})
    a2 = sig.valuation_of({"P": "0", "B": "1", "L": "0"})
    model = EpistemicModel(sig, fns, [a1, a2])
    return PointedModel(model, a1)


@pytest.fixture
def sig_flash():
    return flashlight_signature()


@pytest.fixture
def fns_flash(sig_flash):
    return flashlight_functions(sig_flash)


@pytest.fixture
def pointed_flash():
    return flashlight_pointed()


@pytest.fixture
def pointed_flash_obs():
    return flashlight_pointed(observables=("P", "L"))


def random_formula(rng: random.Random, sig, depth: int, allow=("K", "!")):
    """Plain recursive generator used as an oracle independent of the
    package's own sampler."""
    if depth <= 0 or rng.random() < 0.2:
        var = rng.choice(sig.order)
        return Atom(var, rng.choice(sig.ranges[var]))
    choices = ["~", "&", "[]"]
    choices += [c for c in allow if c in ("K", "!")]
    kind = rng.choice(choices)
    if kind == "~":
        return Not(random_formula(rng, sig, depth - 1, allow))
    if kind == "&":
        return And(
            random_formula(rng, sig, depth - 1, allow),
            random_formula(rng, sig, depth - 1, allow),
        )
    if kind == "K":
        return Know(random_formula(rng, sig, depth - 1, allow))
    if kind == "[]":
        vars_ = rng.sample(sig.order, rng.randint(0, min(2, len(sig.order))))
        pairs = tuple((v, rng.choice(sig.ranges[v])) for v in vars_)
        return Intervene(Assignment(pairs), random_formula(rng, sig, depth - 1, allow))
    return Announce(
        random_formula(rng, sig, depth - 1, allow),
        random_formula(rng, sig, depth - 1, allow),
    )
