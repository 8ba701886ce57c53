"""
Optical and atomic elements, each compiled to a :class:`ModeTransform`.

Every element acts as a small block on a few modes and as the identity on
the rest of the basis.  The balanced 50/50 block used by the splitters is

    (1/sqrt 2) [[1, i],
                [i, 1]]

which is symmetric, so the same matrix serves for annihilation and creation
operators.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from hyperhybrid.errors import BasisMismatch, InvalidPair, NotUnitary, UnknownPath
from hyperhybrid.modes import Mode, ModeBasis, ModeTransform, Spin, is_unitary

BALANCED_BLOCK = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)

#: Allowed PBS reflection phases (the DSL token set).
REFLECTION_PHASES = {"1": 1 + 0j, "i": 1j, "-1": -1 + 0j, "-i": -1j}
#: Reflection phase used when none is given; see ``optical_hybrid_splitter``.
DEFAULT_REFLECTION_PHASE = 1 + 0j


def _ordered_pair(pair, what):
    a, b = pair
    if not isinstance(a, Mode) or not isinstance(b, Mode):
        raise TypeError(f"{what} pair must hold two Mode objects")
    if a.spin == b.spin:
        raise InvalidPair(f"{what} requires distinct spins")
    if a.path == b.path:
        raise InvalidPair(f"{what} requires distinct paths")
    return (a, b) if a.spin == Spin.DOWN else (b, a)


@dataclass(frozen=True)
class HybridBS:
    """Balanced splitter coupling ``(down, p1)`` with ``(up, p2)``.

    The pair is stored as (down-spin mode, up-spin mode).
    """

    pair: tuple

    def __post_init__(self):
        object.__setattr__(self, "pair", _ordered_pair(self.pair, "hybrid splitter"))


@dataclass(frozen=True)
class StandardBS:
    """Balanced splitter between two paths, applied once per spin."""

    paths: tuple

    def __post_init__(self):
        p1, p2 = self.paths
        if p1 == p2:
            raise InvalidPair("standard splitter requires distinct paths")
        object.__setattr__(self, "paths", (p1, p2))


@dataclass(frozen=True)
class Phase:
    """``exp(i * angle)`` on every mode of ``path``, both spins."""

    path: str
    angle: float

    def __post_init__(self):
        angle = float(self.angle)
        if not math.isfinite(angle):
            raise ValueError("phase angle must be finite")
        object.__setattr__(self, "angle", angle)


@dataclass(frozen=True)
class PolarizingBS:
    """Transmits ``transmit`` unchanged; swaps the two paths of the other spin.

    Each swapped amplitude picks up ``reflection_phase`` (unit modulus).
    """

    transmit: Spin
    paths: tuple
    reflection_phase: complex = DEFAULT_REFLECTION_PHASE

    def __post_init__(self):
        object.__setattr__(self, "transmit", Spin(self.transmit))
        p1, p2 = self.paths
        if p1 == p2:
            raise InvalidPair("polarizing splitter requires distinct paths")
        object.__setattr__(self, "paths", (p1, p2))
        phase = complex(self.reflection_phase)
        if abs(abs(phase) - 1) > 1e-12:
            raise ValueError("reflection phase must have unit magnitude")
        object.__setattr__(self, "reflection_phase", phase)


@dataclass(frozen=True)
class QuarterWave:
    """Balanced spin splitter on one path, ``(down, p) <-> (up, p)``."""

    path: str


@dataclass(frozen=True)
class Raman:
    """Two-photon Raman pulse coupling a (down, p) / (up, p') pair.

    With ``c = cos(area/2)``, ``s = sin(area/2)`` the block on
    (down mode, up mode) is ``[[c, i e^{i phase} s], [i e^{-i phase} s, c]]``.
    Hence a down particle acquires ``i e^{-i laser_phase} s`` on the up mode;
    ``area = pi/2, laser_phase = 0`` is exactly the hybrid splitter.
    """

    pair: tuple
    pulse_area: float
    laser_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pair", _ordered_pair(self.pair, "raman pulse"))
        object.__setattr__(self, "pulse_area", float(self.pulse_area))
        object.__setattr__(self, "laser_phase", float(self.laser_phase))


@dataclass(frozen=True)
class Custom:
    """Arbitrary unitary block over ``modes``."""

    modes: tuple
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (len(self.modes), len(self.modes)):
            raise ValueError("custom matrix must be square over its modes")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __eq__(self, other):
        return (
            isinstance(other, Custom)
            and self.modes == other.modes
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.modes, self.matrix.tobytes()))


Element = Union[HybridBS, StandardBS, Phase, PolarizingBS, QuarterWave, Raman, Custom]


def _path_mode(basis: ModeBasis, spin: Spin, path: str) -> int:
    basis.modes_on_path(path)  # raises UnknownPath
    mode = Mode(spin, path)
    if mode not in basis:
        raise UnknownPath(f"path {path!r} has no {spin.token} mode in the basis")
    return basis.index_of(mode)


def _embed(basis: ModeBasis, blocks) -> np.ndarray:
    matrix = np.eye(len(basis), dtype=complex)
    for idx, block in blocks:
        matrix[np.ix_(idx, idx)] = block
    return matrix


def compile_element(spec: Element, basis: ModeBasis) -> ModeTransform:
    """Compile one element into a unitary on ``basis``."""
    if isinstance(spec, HybridBS):
        idx = [basis.index_of(m) for m in spec.pair]
        matrix = _embed(basis, [(idx, BALANCED_BLOCK)])
    elif isinstance(spec, StandardBS):
        p1, p2 = spec.paths
        spins = sorted({m.spin for m in basis.modes_on_path(p1)} | {m.spin for m in basis.modes_on_path(p2)})
        blocks = [([_path_mode(basis, s, p1), _path_mode(basis, s, p2)], BALANCED_BLOCK) for s in spins]
        matrix = _embed(basis, blocks)
    elif isinstance(spec, Phase):
        matrix = np.eye(len(basis), dtype=complex)
        for mode in basis.modes_on_path(spec.path):
            matrix[basis.index_of(mode), basis.index_of(mode)] = cmath.exp(1j * spec.angle)
    elif isinstance(spec, PolarizingBS):
        p1, p2 = spec.paths
        r = spec.reflection_phase
        swapped = spec.transmit.flipped()
        i1, i2 = _path_mode(basis, swapped, p1), _path_mode(basis, swapped, p2)
        matrix = _embed(basis, [([i1, i2], np.array([[0, r], [r, 0]]))])
    elif isinstance(spec, QuarterWave):
        idx = [_path_mode(basis, Spin.DOWN, spec.path), _path_mode(basis, Spin.UP, spec.path)]
        matrix = _embed(basis, [(idx, BALANCED_BLOCK)])
    elif isinstance(spec, Raman):
        c, s = math.cos(spec.pulse_area / 2), math.sin(spec.pulse_area / 2)
        phase = cmath.exp(1j * spec.laser_phase)
        block = np.array([[c, 1j * phase * s], [1j * phase.conjugate() * s, c]])
        idx = [basis.index_of(m) for m in spec.pair]
        matrix = _embed(basis, [(idx, block)])
    elif isinstance(spec, Custom):
        if not is_unitary(spec.matrix):
            raise NotUnitary("custom element matrix is not unitary")
        idx = [basis.index_of(m) for m in spec.modes]
        if len(set(idx)) != len(idx):
            raise InvalidPair("custom element lists a mode twice")
        matrix = _embed(basis, [(idx, spec.matrix)])
    else:
        raise TypeError(f"not an element: {spec!r}")
    return ModeTransform(basis, matrix)


def compose(t2: ModeTransform, t1: ModeTransform) -> ModeTransform:
    """Transform equivalent to applying ``t1`` first, then ``t2``."""
    if t1.basis != t2.basis:
        raise BasisMismatch("cannot compose transforms on different bases")
    return ModeTransform(t1.basis, t2.matrix @ t1.matrix)


def compile_sequence(specs: Sequence[Element], basis: ModeBasis) -> ModeTransform:
    total = ModeTransform.identity(basis)
    for spec in specs:
        total = compose(compile_element(spec, basis), total)
    return total


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> tuple:
    """Smallest ``max|a * g - b|`` over unit ``g``, and the minimising ``g``.

    The optimal phase aligns ``a`` with ``b`` in the Frobenius sense; when
    the matrices are orthogonal any phase is optimal and 1 is returned.
    """
    overlap = np.vdot(a.ravel(), b.ravel())
    g = overlap / abs(overlap) if abs(overlap) > 1e-15 else 1 + 0j
    return float(np.max(np.abs(a * g - b))), complex(g)


def optical_hybrid_splitter(path1: str, path2: str, reflection_phase: complex = DEFAULT_REFLECTION_PHASE,
                            crossed: bool = False) -> list:
    """PBS / quarter-wave plates / PBS chain meant to realise a hybrid splitter.

    The first PBS transmits ``down``, the second transmits ``up``.  With
    ``crossed=True`` the two arms are exchanged between the wave plates and
    the second PBS (a mirror crossing); without it each amplitude is
    deflected exactly once overall and the chain maps ``(down, path1)`` onto
    ``(down, path2)`` / ``(up, path1)`` instead of onto a hybrid-splitter pair.
    """
    chain = [
        PolarizingBS(Spin.DOWN, (path1, path2), reflection_phase),
        QuarterWave(path1),
        QuarterWave(path2),
    ]
    if crossed:
        chain.append(Custom(
            (Mode(Spin.DOWN, path1), Mode(Spin.DOWN, path2), Mode(Spin.UP, path1), Mode(Spin.UP, path2)),
            np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        ))
    chain.append(PolarizingBS(Spin.UP, (path1, path2), reflection_phase))
    return chain


def hybrid_splitter_pair(path1: str, path2: str) -> list:
    """Both hybrid couplings on two paths: (down,p1)-(up,p2) and (down,p2)-(up,p1)."""
    return [
        HybridBS((Mode(Spin.DOWN, path1), Mode(Spin.UP, path2))),
        HybridBS((Mode(Spin.DOWN, path2), Mode(Spin.UP, path1))),
    ]
