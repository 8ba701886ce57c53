"""
Bell-state analysis with a standard or a hybrid beam splitter.

Two input ports carry one particle each.  The standard analyzer applies the
path-only 50/50 splitter to both spins; the hybrid analyzer applies the two
hybrid couplings ``(down,1)-(up,2)`` and ``(down,2)-(up,1)``.  Detection is
number resolving and records (spin, port) for both particles.

Classification never uses a hard-coded truth table: the set of Bell states
consistent with an event is read off the simulated output distributions.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

from hyperhybrid.elements import StandardBS, compile_element, hybrid_splitter_pair
from hyperhybrid.errors import ImpossibleEvent
from hyperhybrid.modes import KetState, Mode, Spin, apply_transform, product_basis, state_from_modes

DEFAULT_PORTS = ("1", "2")
#: Probabilities at or below this count as "event does not occur".
SUPPORT_EPS = 1e-12


class BellStateId(str, enum.Enum):
    PSI_MINUS = "PsiMinus"
    PSI_PLUS = "PsiPlus"
    PHI_MINUS = "PhiMinus"
    PHI_PLUS = "PhiPlus"


class AnalyzerKind(str, enum.Enum):
    STANDARD = "standard"
    HYBRID = "hybrid"


@dataclass(frozen=True, order=True)
class DetectionEvent:
    """Unordered pair of (spin, port) detections."""

    detections: tuple

    def __post_init__(self):
        dets = tuple(sorted((Spin(s), str(p)) for s, p in self.detections))
        if len(dets) != 2:
            raise ValueError("a detection event holds exactly two detections")
        object.__setattr__(self, "detections", dets)

    @property
    def same_port(self) -> bool:
        return self.detections[0][1] == self.detections[1][1]

    @property
    def same_spin(self) -> bool:
        return self.detections[0][0] == self.detections[1][0]

    def __str__(self):
        return " ".join(f"{s.token}@{p}" for s, p in self.detections)

    @classmethod
    def parse(cls, text: str) -> "DetectionEvent":
        modes = [Mode.parse(part) for part in text.split()]
        return cls(tuple((m.spin, m.path) for m in modes))


@dataclass(frozen=True)
class Classification:
    consistent: frozenset

    @property
    def conclusive(self) -> bool:
        return len(self.consistent) == 1

    def to_json(self) -> dict:
        order = list(BellStateId)
        return {
            "consistent": [b.value for b in sorted(self.consistent, key=order.index)],
            "conclusive": self.conclusive,
        }


def analyzer_basis(ports=DEFAULT_PORTS):
    return product_basis([Spin.DOWN, Spin.UP], ports)


def bell_state(which: BellStateId, ports=DEFAULT_PORTS) -> KetState:
    """Two-particle Bell state, first spin label on ``ports[0]``.

    ``Psi(+/-) = (|up,down> +/- |down,up>)/sqrt 2``,
    ``Phi(+/-) = (|down,down> +/- |up,up>)/sqrt 2``.
    """
    p1, p2 = ports
    if p1 == p2:
        raise ValueError("bell state needs two distinct ports")
    which = BellStateId(which)
    basis = analyzer_basis(ports)
    down, up = Spin.DOWN, Spin.UP

    def pair(s1, s2):
        return state_from_modes(basis, [Mode(s1, p1), Mode(s2, p2)])

    sign = 1 if which in (BellStateId.PSI_PLUS, BellStateId.PHI_PLUS) else -1
    if which in (BellStateId.PSI_MINUS, BellStateId.PSI_PLUS):
        state = pair(up, down) + sign * pair(down, up)
    else:
        state = pair(down, down) + sign * pair(up, up)
    return state / math.sqrt(2)


def analyzer_elements(kind: AnalyzerKind, ports=DEFAULT_PORTS) -> list:
    kind = AnalyzerKind(kind)
    if kind == AnalyzerKind.STANDARD:
        return [StandardBS(tuple(ports))]
    return hybrid_splitter_pair(*ports)


def analyze(state: KetState, kind: AnalyzerKind, ports=DEFAULT_PORTS) -> KetState:
    for spec in analyzer_elements(kind, ports):
        state = apply_transform(state, compile_element(spec, state.basis))
    return state


def _event_of(basis, occ) -> DetectionEvent:
    dets = []
    for mode, n in zip(basis.modes, occ):
        dets.extend([(mode.spin, mode.path)] * n)
    return DetectionEvent(tuple(dets))


@functools.lru_cache(maxsize=None)
def _distribution(which: BellStateId, kind: AnalyzerKind, ports: tuple) -> tuple:
    out = analyze(bell_state(which, ports), kind, ports)
    dist = {}
    for occ, amp in out.sorted_terms():
        prob = abs(amp) ** 2 * math.prod(math.factorial(n) for n in occ)
        if prob > SUPPORT_EPS:
            event = _event_of(out.basis, occ)
            dist[event] = dist.get(event, 0.0) + prob
    return tuple(sorted(dist.items()))


def analyzer_distribution(which: BellStateId, kind: AnalyzerKind, ports=DEFAULT_PORTS) -> dict:
    """Detection-event probabilities for one Bell state through one analyzer."""
    return dict(_distribution(BellStateId(which), AnalyzerKind(kind), tuple(ports)))


def classify_event(event: DetectionEvent, kind: AnalyzerKind, ports=DEFAULT_PORTS) -> Classification:
    """Bell states that give ``event`` nonzero probability under ``kind``."""
    consistent = frozenset(
        which for which in BellStateId
        if analyzer_distribution(which, kind, ports).get(event, 0.0) > SUPPORT_EPS
    )
    if not consistent:
        raise ImpossibleEvent(f"no Bell state produces {event} under the {AnalyzerKind(kind).value} analyzer")
    return Classification(consistent)


def classification_map(kind: AnalyzerKind, ports=DEFAULT_PORTS) -> dict:
    """Every event reachable from some Bell state, mapped to its classification."""
    events = sorted({e for which in BellStateId for e in analyzer_distribution(which, kind, ports)})
    return {event: classify_event(event, kind, ports) for event in events}


def conclusively_identified(kind: AnalyzerKind, ports=DEFAULT_PORTS) -> set:
    """Bell states that produce at least one conclusive event under ``kind``."""
    found = set()
    for cls in classification_map(kind, ports).values():
        if cls.conclusive:
            found |= cls.consistent
    return found
