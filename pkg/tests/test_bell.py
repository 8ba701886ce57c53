import itertools
import math

import pytest

from hyperhybrid.bell import (
    AnalyzerKind,
    BellStateId,
    DetectionEvent,
    analyze,
    analyzer_distribution,
    bell_state,
    classification_map,
    classify_event,
    conclusively_identified,
)
from hyperhybrid.errors import ImpossibleEvent
from hyperhybrid.modes import inner_product, norm

PSI_M, PSI_P, PHI_M, PHI_P = BellStateId
STD, HYB = AnalyzerKind
E = DetectionEvent.parse

# Hand-derived detection statistics (events as "spin@port spin@port").
EXPECTED = {
    STD: {
        PSI_M: {"down@1 up@2": 0.5, "down@2 up@1": 0.5},
        PSI_P: {"down@1 up@1": 0.5, "down@2 up@2": 0.5},
        PHI_M: {"down@1 down@1": 0.25, "down@2 down@2": 0.25, "up@1 up@1": 0.25, "up@2 up@2": 0.25},
        PHI_P: {"down@1 down@1": 0.25, "down@2 down@2": 0.25, "up@1 up@1": 0.25, "up@2 up@2": 0.25},
    },
    HYB: {
        PSI_M: {"down@1 down@1": 0.25, "down@2 down@2": 0.25, "up@1 up@1": 0.25, "up@2 up@2": 0.25},
        PSI_P: {"down@1 down@1": 0.25, "down@2 down@2": 0.25, "up@1 up@1": 0.25, "up@2 up@2": 0.25},
        PHI_M: {"down@1 down@2": 0.5, "up@1 up@2": 0.5},
        PHI_P: {"down@1 up@1": 0.5, "down@2 up@2": 0.5},
    },
}


def test_bell_states_are_orthonormal():
    states = {b: bell_state(b) for b in BellStateId}
    for a, b in itertools.product(BellStateId, repeat=2):
        want = 1.0 if a == b else 0.0
        assert abs(inner_product(states[a], states[b]) - want) < 1e-15


def test_psi_minus_definition():
    # (|up,down> - |down,up>)/sqrt 2, with the first label on port 1
    got = {k: complex(*v) for k, v in bell_state(PSI_M).to_json().items()}
    assert got == pytest.approx({"down@2:1,up@1:1": 1 / math.sqrt(2), "down@1:1,up@2:1": -1 / math.sqrt(2)}, abs=1e-15)


def test_same_ports_rejected():
    with pytest.raises(ValueError):
        bell_state(PSI_M, ports=("1", "1"))


@pytest.mark.parametrize("kind", list(AnalyzerKind))
@pytest.mark.parametrize("which", list(BellStateId))
def test_distributions(kind, which):
    got = {str(e): p for e, p in analyzer_distribution(which, kind).items()}
    assert got == pytest.approx(EXPECTED[kind][which], abs=1e-12)
    assert abs(norm(analyze(bell_state(which), kind)) - 1) < 1e-12


@pytest.mark.parametrize("event, kind, states", [
    ("down@1 up@2", STD, {PSI_M}),
    ("up@1 down@2", STD, {PSI_M}),
    ("down@2 up@2", STD, {PSI_P}),
    ("up@1 up@1", STD, {PHI_M, PHI_P}),
    ("down@1 down@2", HYB, {PHI_M}),
    ("down@1 up@1", HYB, {PHI_P}),
    ("down@2 down@2", HYB, {PSI_M, PSI_P}),
])
def test_classify(event, kind, states):
    cls = classify_event(E(event), kind)
    assert cls.consistent == states
    assert cls.conclusive == (len(states) == 1)


@pytest.mark.parametrize("event, kind", [("down@1 down@2", STD), ("down@1 up@2", HYB)])
def test_impossible_event(event, kind):
    with pytest.raises(ImpossibleEvent):
        classify_event(E(event), kind)


def test_complementary_analyzers():
    assert conclusively_identified(STD) == {PSI_M, PSI_P}
    assert conclusively_identified(HYB) == {PHI_M, PHI_P}
    assert conclusively_identified(STD) | conclusively_identified(HYB) == set(BellStateId)


def test_event_parse_and_order():
    e = E("up@1 down@2")
    assert str(e) == "down@2 up@1"
    assert not e.same_port and not e.same_spin
    assert E("down@1 down@1").same_port
    with pytest.raises(ValueError):
        DetectionEvent(((0, "1"),))


def test_other_port_labels():
    m = classification_map(HYB, ports=("a", "b"))
    assert m[E("down@a down@b")].consistent == {PHI_M}
