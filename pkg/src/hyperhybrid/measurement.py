"""
Coincidence post-selection, outcome tables, correlators and CHSH values.

Alice owns paths L and D, Bob owns R and U.  Each party either reads which
of its paths fired (``Dof.EXTERNAL``) or the spin of its particle
(``Dof.SPIN``).  Outcomes are mapped to +1/-1 by a :class:`SignConvention`;
tables are indexed ``[alice, bob]`` with index 0 for +1 and 1 for -1.
"""

from __future__ import annotations

import csv
import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from hyperhybrid.circuit import YsPhases, build_yurke_stoler, run
from hyperhybrid.errors import NoCoincidences, WrongParticleNumber
from hyperhybrid.modes import KetState, Mode, Spin, fock_probability, occupation_key

TSIRELSON = 2 * math.sqrt(2)


class Dof(str, enum.Enum):
    EXTERNAL = "external"
    SPIN = "spin"


ALL_DOF_PAIRS = tuple(itertools.product(Dof, Dof))


@dataclass(frozen=True)
class PartyAssignment:
    alice_paths: frozenset = frozenset({"L", "D"})
    bob_paths: frozenset = frozenset({"R", "U"})

    def __post_init__(self):
        object.__setattr__(self, "alice_paths", frozenset(self.alice_paths))
        object.__setattr__(self, "bob_paths", frozenset(self.bob_paths))
        if self.alice_paths & self.bob_paths:
            raise ValueError("alice and bob paths must be disjoint")
        if not self.alice_paths or not self.bob_paths:
            raise ValueError("each party needs at least one path")

    def paths(self, party: str) -> frozenset:
        return {"alice": self.alice_paths, "bob": self.bob_paths}[party]


@dataclass(frozen=True)
class SignConvention:
    """Which outcome counts as +1 for each party."""

    alice_external_plus: str = "L"
    bob_external_plus: str = "U"
    alice_spin_plus: Spin = Spin.UP
    bob_spin_plus: Spin = Spin.UP

    def sign(self, party: str, dof: Dof, mode: Mode) -> int:
        if dof == Dof.EXTERNAL:
            plus = self.alice_external_plus if party == "alice" else self.bob_external_plus
            return 1 if mode.path == plus else -1
        plus = self.alice_spin_plus if party == "alice" else self.bob_spin_plus
        return 1 if mode.spin == plus else -1

    def flipped(self, party: str, parties: PartyAssignment = PartyAssignment()) -> "SignConvention":
        """Swap the +1/-1 assignment of one party, for both DOF."""
        own = parties.paths(party)
        if len(own) != 2:
            raise ValueError("flipping an external sign needs exactly two party paths")
        if party == "alice":
            (other,) = own - {self.alice_external_plus}
            return SignConvention(other, self.bob_external_plus, self.alice_spin_plus.flipped(), self.bob_spin_plus)
        (other,) = own - {self.bob_external_plus}
        return SignConvention(self.alice_external_plus, other, self.alice_spin_plus, self.bob_spin_plus.flipped())


@dataclass(frozen=True)
class OutcomeTable:
    """Post-selected joint probabilities; ``p[0, 0]`` is P(+1, +1)."""

    p: np.ndarray = field(compare=False)
    alice_dof: Dof = Dof.EXTERNAL
    bob_dof: Dof = Dof.EXTERNAL

    @property
    def pp(self) -> float:
        return float(self.p[0, 0])

    @property
    def pm(self) -> float:
        return float(self.p[0, 1])

    @property
    def mp(self) -> float:
        return float(self.p[1, 0])

    @property
    def mm(self) -> float:
        return float(self.p[1, 1])

    @property
    def weight(self) -> float:
        return float(self.p.sum())

    def alice_marginal(self) -> np.ndarray:
        return self.p.sum(axis=1) / self.weight

    def bob_marginal(self) -> np.ndarray:
        return self.p.sum(axis=0) / self.weight

    def to_json(self) -> dict:
        return {"pp": self.pp, "pm": self.pm, "mp": self.mp, "mm": self.mm, "weight": self.weight}


def postselect_coincidence(state: KetState, parties: PartyAssignment = PartyAssignment()) -> list:
    """Fock configurations with exactly one particle on each side, with probabilities.

    Events with both particles on one side are dropped; nothing is
    renormalised here.
    """
    numbers = state.particle_numbers()
    if numbers != {2}:
        raise WrongParticleNumber(f"expected a two-particle state, got particle numbers {sorted(numbers)}")
    modes = state.basis.modes
    known = parties.alice_paths | parties.bob_paths
    kept = []
    for occ, _ in state.sorted_terms():
        occupied = [m for m, n in zip(modes, occ) if n]
        for m in occupied:
            if m.path not in known:
                raise ValueError(f"path {m.path!r} is not assigned to either party")
        n_alice = sum(n for m, n in zip(modes, occ) if m.path in parties.alice_paths)
        if n_alice == 1:
            kept.append((occ, fock_probability(state, occ)))
    return kept


def _party_mode(modes, occ, paths) -> Mode:
    (mode,) = [m for m, n in zip(modes, occ) if n and m.path in paths]
    return mode


def outcome_table(
    state: KetState,
    parties: PartyAssignment = PartyAssignment(),
    alice_dof: Dof = Dof.EXTERNAL,
    bob_dof: Dof = Dof.EXTERNAL,
    signs: SignConvention = SignConvention(),
) -> OutcomeTable:
    """2x2 table over (alice sign, bob sign); the unmeasured DOF is summed over."""
    alice_dof, bob_dof = Dof(alice_dof), Dof(bob_dof)
    for party, plus in (("alice", signs.alice_external_plus), ("bob", signs.bob_external_plus)):
        if plus not in parties.paths(party):
            raise ValueError(f"{party}'s +1 path {plus!r} is not one of its paths")
    p = np.zeros((2, 2))
    modes = state.basis.modes
    for occ, prob in postselect_coincidence(state, parties):
        a = signs.sign("alice", alice_dof, _party_mode(modes, occ, parties.alice_paths))
        b = signs.sign("bob", bob_dof, _party_mode(modes, occ, parties.bob_paths))
        p[(1 - a) // 2, (1 - b) // 2] += prob
    p.setflags(write=False)
    return OutcomeTable(p, alice_dof, bob_dof)


def correlation(table: OutcomeTable) -> float:
    """Normalised expectation ``(P++ - P+- - P-+ + P--) / sum P``."""
    weight = table.weight
    if weight <= 1e-15:
        raise NoCoincidences("no coincidence events: correlator undefined")
    return (table.pp - table.pm - table.mp + table.mm) / weight


# -- CHSH ------------------------------------------------------------------

def difference_embedding(phi_a: float, phi_b: float) -> YsPhases:
    """Alice's setting on D, Bob's on R; the tables then depend on ``phi_a - phi_b``."""
    return YsPhases(phi_d=phi_a, phi_r=phi_b)


def sum_embedding(phi_a: float, phi_b: float) -> YsPhases:
    """Alice's setting on D, Bob's on U; the tables then depend on ``phi_a + phi_b``."""
    return YsPhases(phi_d=phi_a, phi_u=phi_b)


canonical_embedding = difference_embedding


@dataclass(frozen=True)
class ChshSettings:
    phi_a0: float
    phi_a1: float
    phi_b0: float
    phi_b1: float
    alice_dof: Dof = Dof.EXTERNAL
    bob_dof: Dof = Dof.EXTERNAL

    def __post_init__(self):
        for name in ("phi_a0", "phi_a1", "phi_b0", "phi_b1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "alice_dof", Dof(self.alice_dof))
        object.__setattr__(self, "bob_dof", Dof(self.bob_dof))


@dataclass(frozen=True)
class ChshResult:
    settings: ChshSettings
    s_value: float
    correlators: dict  # keys "a0b0", "a1b0", "a0b1", "a1b1"
    tables: dict

    def to_json(self) -> dict:
        s = self.settings
        return {
            "settings": {"phiA0": s.phi_a0, "phiA1": s.phi_a1, "phiB0": s.phi_b0, "phiB1": s.phi_b1,
                         "aliceDof": s.alice_dof.value, "bobDof": s.bob_dof.value},
            "S": self.s_value,
            "absS": abs(self.s_value),
            "correlators": dict(self.correlators),
            "tables": {k: t.to_json() for k, t in self.tables.items()},
        }


@functools.lru_cache(maxsize=4096)
def ys_output(phases: YsPhases) -> KetState:
    """Interferometer output for the given path phases (memoised)."""
    return run(build_yurke_stoler(phases))


def ys_table(phases: YsPhases, alice_dof=Dof.EXTERNAL, bob_dof=Dof.EXTERNAL,
             parties: PartyAssignment = PartyAssignment(), signs: SignConvention = SignConvention()) -> OutcomeTable:
    return outcome_table(ys_output(phases), parties, alice_dof, bob_dof, signs)


def chsh(
    settings: ChshSettings,
    embedding: Callable[[float, float], YsPhases] = canonical_embedding,
    parties: PartyAssignment = PartyAssignment(),
    signs: SignConvention = SignConvention(),
) -> ChshResult:
    """``S = E(a0,b0) + E(a1,b0) + E(a0,b1) - E(a1,b1)`` on the interferometer."""
    combos = {
        "a0b0": (settings.phi_a0, settings.phi_b0),
        "a1b0": (settings.phi_a1, settings.phi_b0),
        "a0b1": (settings.phi_a0, settings.phi_b1),
        "a1b1": (settings.phi_a1, settings.phi_b1),
    }
    tables = {
        key: ys_table(embedding(a, b), settings.alice_dof, settings.bob_dof, parties, signs)
        for key, (a, b) in combos.items()
    }
    e = {key: correlation(t) for key, t in tables.items()}
    s_value = e["a0b0"] + e["a1b0"] + e["a0b1"] - e["a1b1"]
    return ChshResult(settings, s_value, e, tables)


def chsh_grid(e: np.ndarray) -> np.ndarray:
    """All CHSH values from a correlator matrix ``e[a, b]``, indexed ``[a0, a1, b0, b1]``."""
    a0 = e[:, None, :, None]
    a1b0 = e[None, :, :, None]
    a0b1 = e[:, None, None, :]
    a1b1 = e[None, :, None, :]
    return a0 + a1b0 + a0b1 - a1b1


@dataclass(frozen=True)
class ScanResult:
    angles: np.ndarray = field(compare=False)
    alice_dof: Dof
    bob_dof: Dof
    s: np.ndarray = field(compare=False)
    best: ChshSettings
    best_s: float

    @property
    def max_abs_s(self) -> float:
        return abs(self.best_s)

    CSV_HEADER = ("phiA0", "phiA1", "phiB0", "phiB1", "aliceDof", "bobDof", "S")

    def rows(self) -> Iterable[tuple]:
        n = len(self.angles)
        for i0, i1, j0, j1 in itertools.product(range(n), repeat=4):
            yield (self.angles[i0], self.angles[i1], self.angles[j0], self.angles[j1],
                   self.alice_dof.value, self.bob_dof.value, self.s[i0, i1, j0, j1])

    def write_csv(self, fh, header: bool = True, fmt: Callable[[float], str] = repr) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(self.CSV_HEADER)
        for row in self.rows():
            writer.writerow([fmt(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def scan_angles(resolution: int) -> np.ndarray:
    if resolution < 8:
        raise ValueError("scan resolution must be at least 8 points per angle")
    return 2 * math.pi * np.arange(resolution) / resolution


def scan_chsh(
    resolution: int = 16,
    alice_dof: Dof = Dof.EXTERNAL,
    bob_dof: Dof = Dof.EXTERNAL,
    parties: PartyAssignment = PartyAssignment(),
    signs: SignConvention = SignConvention(),
    embedding: Callable[[float, float], YsPhases] = canonical_embedding,
    angles: Optional[Iterable[float]] = None,
) -> ScanResult:
    """Exhaustive CHSH scan over a product grid of the four settings.

    The grid defaults to ``resolution`` equally spaced angles in [0, 2 pi).
    Ties in ``|S|`` (within 1e-12) go to the lexicographically smallest
    settings.
    """
    alice_dof, bob_dof = Dof(alice_dof), Dof(bob_dof)
    grid = scan_angles(resolution) if angles is None else np.asarray(sorted(set(map(float, angles))))
    e = np.array([
        [correlation(ys_table(embedding(a, b), alice_dof, bob_dof, parties, signs)) for b in grid]
        for a in grid
    ])
    s = chsh_grid(e)
    s.setflags(write=False)
    mag = np.abs(s)
    best_index = int(np.flatnonzero(mag >= mag.max() - 1e-12)[0])
    i0, i1, j0, j1 = np.unravel_index(best_index, s.shape)
    best = ChshSettings(grid[i0], grid[i1], grid[j0], grid[j1], alice_dof, bob_dof)
    return ScanResult(grid, alice_dof, bob_dof, s, best, float(s[i0, i1, j0, j1]))
