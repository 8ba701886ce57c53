"""Simulator for hybrid (spin x path) beam-splitter interferometers with two bosons."""

from hyperhybrid.bell import AnalyzerKind, BellStateId, analyzer_distribution, bell_state, classify_event
from hyperhybrid.circuit import Circuit, YsPhases, build_yurke_stoler, run
from hyperhybrid.dsl import parse, render
from hyperhybrid.elements import (
    Custom,
    HybridBS,
    Phase,
    PolarizingBS,
    QuarterWave,
    Raman,
    StandardBS,
    compile_element,
    compose,
)
from hyperhybrid.measurement import (
    ChshSettings,
    Dof,
    PartyAssignment,
    SignConvention,
    chsh,
    correlation,
    outcome_table,
    postselect_coincidence,
    scan_chsh,
)
from hyperhybrid.modes import (
    KetState,
    Mode,
    ModeBasis,
    ModeTransform,
    Spin,
    apply_transform,
    fock_probability,
    inner_product,
    make_basis,
    norm,
    state_from_modes,
)

__version__ = "0.1.0"
