"""Circuit container, the two-source hybrid interferometer, and execution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from hyperhybrid.elements import Element, HybridBS, Phase, compile_element
from hyperhybrid.errors import HyperhybridError
from hyperhybrid.modes import KetState, Mode, ModeBasis, Spin, apply_transform, product_basis, state_from_modes

#: Detector paths of the interferometer, in basis order.
YS_PATHS = ("R", "L", "U", "D")


@dataclass(frozen=True)
class Circuit:
    basis: ModeBasis
    inputs: tuple
    elements: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "elements", tuple(self.elements))
        for mode in self.inputs:
            self.basis.index_of(mode)
        for index, spec in enumerate(self.elements):
            try:
                compile_element(spec, self.basis)
            except HyperhybridError as exc:
                raise _tag(exc, index, spec)

    def with_elements(self, elements: Sequence[Element]) -> "Circuit":
        return Circuit(self.basis, self.inputs, tuple(elements))


@dataclass(frozen=True)
class YsPhases:
    """Path phases of the interferometer (radians)."""

    phi_r: float = 0.0
    phi_l: float = 0.0
    phi_u: float = 0.0
    phi_d: float = 0.0

    def __post_init__(self):
        for name in ("phi_r", "phi_l", "phi_u", "phi_d"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def total(self) -> float:
        """Half the combination ``phi_d - phi_l - phi_r + phi_u`` that sets every table."""
        return (self.phi_d - self.phi_l - self.phi_r + self.phi_u) / 2


def _tag(exc: HyperhybridError, index: int, spec) -> HyperhybridError:
    exc.element_index = index
    exc.args = (f"element {index} ({type(spec).__name__}): {exc.args[0] if exc.args else ''}",) + exc.args[1:]
    return exc


def ys_basis() -> ModeBasis:
    return product_basis([Spin.DOWN, Spin.UP], YS_PATHS)


def _m(spin, path):
    return Mode(spin, path)


def first_layer() -> tuple:
    """Bob's and Alice's source splitters; the spin-flipped branch goes to the other party."""
    down, up = Spin.DOWN, Spin.UP
    return (
        HybridBS((_m(down, "R"), _m(up, "D"))),
        HybridBS((_m(down, "L"), _m(up, "U"))),
    )


def second_layer() -> tuple:
    """Alice mixes L with D, Bob mixes R with U."""
    down, up = Spin.DOWN, Spin.UP
    return (
        HybridBS((_m(down, "L"), _m(up, "D"))),
        HybridBS((_m(down, "R"), _m(up, "U"))),
    )


def phase_layer(phases: YsPhases) -> tuple:
    return (
        Phase("R", phases.phi_r),
        Phase("L", phases.phi_l),
        Phase("U", phases.phi_u),
        Phase("D", phases.phi_d),
    )


def build_yurke_stoler(phases: YsPhases = YsPhases()) -> Circuit:
    """Two independent down-spin particles in R and L through two hybrid-splitter layers.

    Alice receives paths L and D, Bob receives R and U.
    """
    return Circuit(
        ys_basis(),
        (_m(Spin.DOWN, "R"), _m(Spin.DOWN, "L")),
        first_layer() + phase_layer(phases) + second_layer(),
    )


def run(circuit: Circuit) -> KetState:
    state = state_from_modes(circuit.basis, circuit.inputs)
    for index, spec in enumerate(circuit.elements):
        try:
            state = apply_transform(state, compile_element(spec, circuit.basis))
        except HyperhybridError as exc:
            raise _tag(exc, index, spec)
    return state
