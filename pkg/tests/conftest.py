import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from algebroids.algebroid import (
    AlgebroidPresentation,
    action_preset,
    foliation_preset,
    lie_algebra_preset,
    presentation_generators,
    tangent_preset,
)

DATA = Path(__file__).parent / "data"


def make_ab2():
    return lie_algebra_preset("Ab2", ["e1", "e2"], {})


def make_ab3():
    return lie_algebra_preset("Ab3", ["e1", "e2", "e3"], {})


def make_aff1():
    return lie_algebra_preset("Aff1", ["e1", "e2"], {("e1", "e2"): {"e2": 1}})


def make_sl2():
    return lie_algebra_preset(
        "SL2", ["e1", "e2", "e3"],
        {("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e1": 1}, ("e3", "e1"): {"e2": 1}})


def make_heis():
    # graded nilpotent: weights make the weight bookkeeping non-trivial
    return lie_algebra_preset("Heis", ["e1", "e2", "e3"],
                              {("e1", "e2"): {"e3": 1}}, weights=[1, 1, 2])


def make_fol_r2():
    return foliation_preset("TFolR2", [("x", 1), ("y", 1)], [[1, 0]], ["F1"])


def make_action():
    base = [("x", 1)]
    secs = [("e1", 0), ("e2", 1)]
    gens = presentation_generators(base, secs)
    return action_preset("Act", base, secs, {("e1", "e2"): {"e2": 1}},
                         {"e1": {"x": gens.var("x").scale(-1)}, "e2": {"x": gens.scalar(1)}})


@pytest.fixture
def ab2():
    return make_ab2()


@pytest.fixture
def ab3():
    return make_ab3()


@pytest.fixture
def aff1():
    return make_aff1()


@pytest.fixture
def sl2():
    return make_sl2()


@pytest.fixture
def heis():
    return make_heis()


@pytest.fixture
def tr1():
    return tangent_preset(1)


@pytest.fixture
def tr2():
    return tangent_preset(2)


@pytest.fixture
def fol_r2():
    return make_fol_r2()


@pytest.fixture
def action():
    return make_action()


def corpus():
    """Every corpus presentation, freshly built."""
    return [make_ab2(), make_aff1(), make_sl2(), make_heis(),
            tangent_preset(1), tangent_preset(2), make_fol_r2(), make_action()]
