"""
Few-boson states as creation-operator polynomials over a finite mode basis.

A :class:`KetState` stores complex coefficients of ordered creation
monomials ``prod_m (a_m^dagger)^{n_m} |0>``.  Coefficients are attached to the
*unnormalised* monomials, so a linear mode transform is a pure polynomial
substitution and factorial weights only show up when norms or Born
probabilities are extracted.

>>> basis = product_basis([Spin.DOWN], ["1", "2"])
>>> bunched = state_from_modes(basis, [Mode(Spin.DOWN, "1")] * 2)
>>> norm_squared(bunched)
2.0
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from hyperhybrid.errors import BasisMismatch, DuplicateMode, NotUnitary, UnknownMode, UnknownPath

#: Terms with ``|c|`` below this are dropped after each transform.
PRUNE_EPS = 1e-14
#: Entrywise tolerance on ``M^dagger M - 1`` for a matrix to count as unitary.
UNITARY_TOL = 1e-12

Occupation = tuple  # tuple[int, ...], one entry per basis mode


class Spin(enum.IntEnum):
    """Internal two-level state; ``DOWN < UP`` fixes canonical ordering."""

    DOWN = 0
    UP = 1

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, token: str) -> "Spin":
        if token not in ("down", "up"):
            raise ValueError(f"unknown spin {token!r}")
        return cls[token.upper()]

    def flipped(self) -> "Spin":
        return Spin(1 - self)


def _check_path(path: str) -> str:
    if not isinstance(path, str) or not path or any(ch.isspace() for ch in path) or not path.isascii():
        raise ValueError(f"invalid path label {path!r}")
    if "@" in path or ":" in path or "," in path or "=" in path:
        raise ValueError(f"path label {path!r} contains a reserved character")
    return path


@dataclass(frozen=True, order=True)
class Mode:
    """One bosonic mode, the pair (spin, external path)."""

    spin: Spin
    path: str

    def __post_init__(self):
        object.__setattr__(self, "spin", Spin(self.spin))
        _check_path(self.path)

    def __str__(self):
        return f"{self.spin.token}@{self.path}"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        spin, sep, path = text.partition("@")
        if not sep:
            raise ValueError(f"expected <spin>@<path>, got {text!r}")
        return cls(Spin.parse(spin), path)


class ModeBasis:
    """Ordered list of distinct modes with a mode -> position index."""

    __slots__ = ("_modes", "_index")

    def __init__(self, modes: Iterable[Mode]):
        modes = tuple(modes)
        if not modes:
            raise ValueError("a mode basis needs at least one mode")
        index = {}
        for pos, mode in enumerate(modes):
            if not isinstance(mode, Mode):
                raise TypeError(f"expected Mode, got {mode!r}")
            if mode in index:
                raise DuplicateMode(f"duplicate mode {mode}")
            index[mode] = pos
        self._modes = modes
        self._index = MappingProxyType(index)

    @property
    def modes(self) -> tuple:
        return self._modes

    @property
    def index(self) -> Mapping[Mode, int]:
        return self._index

    @property
    def paths(self) -> tuple:
        """Distinct path labels in order of first appearance."""
        return tuple(dict.fromkeys(m.path for m in self._modes))

    @property
    def spins(self) -> tuple:
        return tuple(dict.fromkeys(m.spin for m in self._modes))

    def index_of(self, mode: Mode) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise UnknownMode(f"mode {mode} is not in the basis") from None

    def modes_on_path(self, path: str) -> list:
        found = [m for m in self._modes if m.path == path]
        if not found:
            raise UnknownPath(f"path {path!r} is not in the basis")
        return found

    def is_product(self) -> bool:
        """True when the basis is exactly spins x paths in spin-major order."""
        return self._modes == tuple(Mode(s, p) for s in self.spins for p in self.paths)

    def __len__(self):
        return len(self._modes)

    def __iter__(self):
        return iter(self._modes)

    def __contains__(self, mode):
        return mode in self._index

    def __eq__(self, other):
        return isinstance(other, ModeBasis) and self._modes == other._modes

    def __hash__(self):
        return hash(self._modes)

    def __repr__(self):
        return f"ModeBasis([{', '.join(map(str, self._modes))}])"


def make_basis(modes: Sequence[Mode]) -> ModeBasis:
    return ModeBasis(modes)


def product_basis(spins: Iterable[Spin], paths: Iterable[str]) -> ModeBasis:
    """Basis ``spins x paths`` in spin-major order."""
    paths = list(paths)
    return ModeBasis(Mode(Spin(s), p) for s in spins for p in paths)


def occupation_of(basis: ModeBasis, counts: Mapping[Mode, int]) -> Occupation:
    occ = [0] * len(basis)
    for mode, n in counts.items():
        occ[basis.index_of(mode)] += int(n)
    return tuple(occ)


def occupation_key(basis: ModeBasis, occ: Occupation) -> str:
    """Canonical text form, e.g. ``"down@R:1,down@L:1"`` (empty for vacuum)."""
    return ",".join(f"{mode}:{n}" for mode, n in zip(basis.modes, occ) if n)


def parse_occupation_key(basis: ModeBasis, key: str) -> Occupation:
    counts = defaultdict(int)
    for part in filter(None, key.split(",")):
        mode_text, _, n = part.rpartition(":")
        counts[Mode.parse(mode_text)] += int(n)
    return occupation_of(basis, counts)


def _weight(occ: Occupation) -> int:
    return math.prod(math.factorial(n) for n in occ)


class KetState:
    """Complex combination of creation monomials acting on the vacuum.

    Instances are immutable; arithmetic returns new states.
    """

    __slots__ = ("_basis", "_terms")

    def __init__(self, basis: ModeBasis, terms: Mapping[Occupation, complex]):
        size = len(basis)
        clean = {}
        for occ, amp in terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != size or min(occ, default=0) < 0:
                raise ValueError(f"occupation {occ} does not fit a basis of size {size}")
            amp = complex(amp)
            if amp != 0:
                clean[occ] = clean.get(occ, 0j) + amp
        self._basis = basis
        self._terms = MappingProxyType(clean)

    @property
    def basis(self) -> ModeBasis:
        return self._basis

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return self._terms

    def amplitude(self, occ: Occupation) -> complex:
        return self._terms.get(tuple(occ), 0j)

    def particle_numbers(self) -> set:
        return {sum(occ) for occ in self._terms}

    def sorted_terms(self) -> list:
        """Terms ordered by canonical occupation key."""
        return sorted(self._terms.items(), key=lambda kv: occupation_key(self._basis, kv[0]))

    def _same_basis(self, other):
        if not isinstance(other, KetState):
            return NotImplemented
        if other._basis != self._basis:
            raise BasisMismatch("states live on different mode bases")
        return other

    def __add__(self, other):
        other = self._same_basis(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for occ, amp in other._terms.items():
            out[occ] = out.get(occ, 0j) + amp
        return KetState(self._basis, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return KetState(self._basis, {occ: scalar * amp for occ, amp in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / scalar)

    def __neg__(self):
        return -1 * self

    def __eq__(self, other):
        return (
            isinstance(other, KetState)
            and self._basis == other._basis
            and dict(self._terms) == dict(other._terms)
        )

    def __hash__(self):
        return hash((self._basis, frozenset(self._terms.items())))

    def allclose(self, other: "KetState", atol: float = 1e-10) -> bool:
        """Per-amplitude comparison over the union of both supports."""
        self._same_basis(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def to_json(self) -> dict:
        return {
            occupation_key(self._basis, occ): [amp.real, amp.imag]
            for occ, amp in self.sorted_terms()
        }

    @classmethod
    def from_json(cls, basis: ModeBasis, data: Mapping[str, Sequence[float]]) -> "KetState":
        return cls(basis, {parse_occupation_key(basis, k): complex(re, im) for k, (re, im) in data.items()})

    def __repr__(self):
        body = " + ".join(f"({amp:.6g})[{occupation_key(self._basis, occ) or 'vac'}]" for occ, amp in self.sorted_terms())
        return f"KetState({body or '0'})"


def vacuum(basis: ModeBasis) -> KetState:
    return KetState(basis, {(0,) * len(basis): 1})


def state_from_modes(basis: ModeBasis, occupied: Iterable[Mode]) -> KetState:
    """Apply one creation operator per listed mode to the vacuum.

    Creation operators commute, so the order of ``occupied`` is irrelevant.
    Repeated modes give an unnormalised state with ``norm^2 = prod n_m!``.
    """
    occ = [0] * len(basis)
    for mode in occupied:
        occ[basis.index_of(mode)] += 1
    return KetState(basis, {tuple(occ): 1})


def norm_squared(state: KetState) -> float:
    return float(sum(abs(c) ** 2 * _weight(occ) for occ, c in state.terms.items()))


def norm(state: KetState) -> float:
    return math.sqrt(norm_squared(state))


def inner_product(a: KetState, b: KetState) -> complex:
    """``<a|b>``, antilinear in ``a``."""
    if a.basis != b.basis:
        raise BasisMismatch("inner product across different bases")
    return complex(sum(c.conjugate() * b.amplitude(occ) * _weight(occ) for occ, c in a.terms.items()))


def prune(state: KetState, eps: float = PRUNE_EPS) -> KetState:
    return KetState(state.basis, {occ: c for occ, c in state.terms.items() if abs(c) >= eps})


def normalized(state: KetState) -> KetState:
    return state / norm(state)


def fock_probability(state: KetState, occupation: Occupation) -> float:
    """Born probability of the Fock configuration ``occupation``."""
    occupation = tuple(occupation)
    return abs(state.amplitude(occupation)) ** 2 * _weight(occupation)


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.all(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])) <= tol))


class ModeTransform:
    """Single-particle unitary on a mode basis.

    Column ``k`` of ``matrix`` is the image of ``a_k^dagger``:
    ``a_k^dagger -> sum_j matrix[j, k] a_j^dagger``.
    """

    __slots__ = ("basis", "matrix")

    def __init__(self, basis: ModeBasis, matrix, check: bool = True):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (len(basis), len(basis)):
            raise ValueError(f"matrix shape {matrix.shape} does not match basis size {len(basis)}")
        if check and not is_unitary(matrix):
            raise NotUnitary("mode transform is not unitary")
        matrix.setflags(write=False)
        self.basis = basis
        self.matrix = matrix

    @classmethod
    def identity(cls, basis: ModeBasis) -> "ModeTransform":
        return cls(basis, np.eye(len(basis)))

    def block(self, modes: Sequence[Mode]) -> np.ndarray:
        """Sub-matrix restricted to ``modes`` (rows and columns in that order)."""
        idx = [self.basis.index_of(m) for m in modes]
        return self.matrix[np.ix_(idx, idx)]

    def __eq__(self, other):
        return (
            isinstance(other, ModeTransform)
            and self.basis == other.basis
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self):
        return f"ModeTransform({self.basis!r}, shape={self.matrix.shape})"


def apply_transform(state: KetState, transform: ModeTransform) -> KetState:
    """Substitute every creation operator by its image and expand.

    Cost grows as ``len(basis) ** n`` per monomial for ``n`` particles.
    """
    if state.basis != transform.basis:
        raise BasisMismatch("state and transform live on different bases")
    matrix = transform.matrix
    if not is_unitary(matrix):
        raise NotUnitary("mode transform is not unitary")
    size = len(state.basis)
    columns = [
        [(j, complex(matrix[j, k])) for j in range(size) if matrix[j, k] != 0]
        for k in range(size)
    ]

    out = defaultdict(complex)
    for occ, amp in state.terms.items():
        partial = {(0,) * size: amp}
        for k, count in enumerate(occ):
            for _ in range(count):
                expanded = defaultdict(complex)
                for p_occ, p_amp in partial.items():
                    for j, m in columns[k]:
                        bumped = list(p_occ)
                        bumped[j] += 1
                        expanded[tuple(bumped)] += p_amp * m
                partial = expanded
        for p_occ, p_amp in partial.items():
            out[p_occ] += p_amp
    return prune(KetState(state.basis, out))
