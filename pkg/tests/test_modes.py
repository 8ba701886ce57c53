import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhybrid.circuit import YsPhases, build_yurke_stoler, run
from hyperhybrid.elements import HybridBS, StandardBS, compile_element, compose
from hyperhybrid.errors import BasisMismatch, DuplicateMode, NotUnitary, UnknownMode
from hyperhybrid.modes import (
    KetState,
    Mode,
    ModeTransform,
    Spin,
    apply_transform,
    fock_probability,
    inner_product,
    make_basis,
    norm,
    norm_squared,
    occupation_key,
    product_basis,
    prune,
    state_from_modes,
    vacuum,
)
from oracles import hom_output, random_unitary

dR, uR = Mode.parse("down@R"), Mode.parse("up@R")
dL = Mode.parse("down@L")


def test_make_basis_small():
    basis = make_basis([dR, uR])
    assert len(basis) == 2
    assert basis.index[uR] == 1


def test_full_interferometer_basis_has_eight_modes(basis8):
    assert len(basis8) == 8
    assert basis8.paths == ("R", "L", "U", "D")


def test_duplicate_mode_is_named():
    with pytest.raises(DuplicateMode, match="down@R"):
        make_basis([dR, dR])


def test_empty_basis_rejected():
    with pytest.raises(ValueError):
        make_basis([])


def test_spin_order():
    assert Spin.DOWN < Spin.UP
    assert sorted([uR, dR]) == [dR, uR]


def test_vacuum_from_empty_list(basis8):
    vac = state_from_modes(basis8, [])
    assert vac == vacuum(basis8)
    assert dict(vac.terms) == {(0,) * 8: 1}


def test_initial_state_is_normalised(basis8):
    psi0 = state_from_modes(basis8, [dR, dL])
    assert norm(psi0) == 1.0
    assert inner_product(psi0, psi0) == 1.0
    occ = tuple(1 if m in (dR, dL) else 0 for m in basis8)
    assert fock_probability(psi0, occ) == 1.0


def test_repeated_mode_norm_is_factorial(basis8):
    state = state_from_modes(basis8, [dR, dR])
    ((occ, amp),) = state.terms.items()
    assert amp == 1
    assert norm_squared(state) == 2.0


def test_unknown_mode(basis8):
    with pytest.raises(UnknownMode):
        state_from_modes(basis8, [Mode(Spin.UP, "X")])


def test_identity_transform_leaves_state(basis8):
    state = run(build_yurke_stoler(YsPhases(0.1, 0.2, 0.3, 0.4)))
    assert apply_transform(state, ModeTransform.identity(basis8)) == state


def test_hybrid_splitter_on_single_particle():
    basis = product_basis([Spin.DOWN, Spin.UP], ["in1", "in2"])
    pair = (Mode(Spin.DOWN, "in1"), Mode(Spin.UP, "in2"))
    out = apply_transform(state_from_modes(basis, [pair[0]]), compile_element(HybridBS(pair), basis))
    assert out.amplitude((1, 0, 0, 0)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert out.amplitude((0, 0, 0, 1)) == pytest.approx(1j / math.sqrt(2), abs=1e-15)
    assert len(out.terms) == 2


def test_hong_ou_mandel_matches_hand_expansion():
    basis = product_basis([Spin.DOWN], ["1", "2"])
    m1, m2 = Mode(Spin.DOWN, "1"), Mode(Spin.DOWN, "2")
    out = apply_transform(state_from_modes(basis, [m1, m2]), compile_element(StandardBS(("1", "2")), basis))
    assert out.allclose(hom_output(basis, m1, m2), atol=1e-15)
    assert fock_probability(out, (1, 1)) == 0.0
    assert fock_probability(out, (2, 0)) == pytest.approx(0.5, abs=1e-15)
    assert fock_probability(out, (0, 2)) == pytest.approx(0.5, abs=1e-15)


def test_fock_probability_absent_and_vacuum(basis8):
    assert fock_probability(vacuum(basis8), (0,) * 8) == 1
    assert fock_probability(vacuum(basis8), (1,) + (0,) * 7) == 0


def test_basis_mismatch():
    a = state_from_modes(make_basis([dR]), [dR])
    b = state_from_modes(make_basis([dR, uR]), [dR])
    with pytest.raises(BasisMismatch):
        inner_product(a, b)
    with pytest.raises(BasisMismatch):
        apply_transform(a, ModeTransform.identity(b.basis))


def test_not_unitary():
    basis = make_basis([dR, uR])
    with pytest.raises(NotUnitary):
        ModeTransform(basis, [[1, 1], [0, 1]])
    sneaky = ModeTransform(basis, [[2, 0], [0, 1]], check=False)
    with pytest.raises(NotUnitary):
        apply_transform(state_from_modes(basis, [dR]), sneaky)


def test_prune_drops_tiny_terms():
    basis = make_basis([dR, uR])
    state = KetState(basis, {(1, 0): 1, (0, 1): 1e-15})
    assert list(prune(state).terms) == [(1, 0)]
    assert list(prune(state, 1e-16).terms) == [(1, 0), (0, 1)]


def test_json_round_trip(basis8):
    state = run(build_yurke_stoler(YsPhases(0.3, -0.2, 1.1, 0.5)))
    data = state.to_json()
    assert "down@R:1,down@L:1" in data
    assert KetState.from_json(basis8, data) == state


def test_occupation_key_order(basis8):
    psi0 = state_from_modes(basis8, [dL, dR])
    (occ,) = psi0.terms
    assert occupation_key(basis8, occ) == "down@R:1,down@L:1"


def test_four_particles_norm_preserved():
    basis = product_basis([Spin.DOWN, Spin.UP], ["a", "b", "c"])
    rng = np.random.default_rng(3)
    t = ModeTransform(basis, random_unitary(len(basis), rng))
    state = state_from_modes(basis, [basis.modes[0], basis.modes[0], basis.modes[3], basis.modes[5]])
    state = state / norm(state)
    assert abs(norm(apply_transform(state, t)) - 1) < 1e-10


# -- properties --------------------------------------------------------------

SMALL = product_basis([Spin.DOWN, Spin.UP], ["R", "L", "U"])
pairs = list(itertools.combinations_with_replacement(range(len(SMALL)), 2))

amplitudes = st.complex_numbers(min_magnitude=0.05, max_magnitude=2, allow_nan=False, allow_infinity=False)


@st.composite
def two_particle_states(draw):
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=6, unique=True))
    terms = {}
    for i, j in chosen:
        occ = [0] * len(SMALL)
        occ[i] += 1
        occ[j] += 1
        terms[tuple(occ)] = draw(amplitudes)
    state = KetState(SMALL, terms)
    return state / norm(state)


unitaries = st.integers(0, 2**32 - 1).map(
    lambda seed: ModeTransform(SMALL, random_unitary(len(SMALL), np.random.default_rng(seed)))
)


@settings(max_examples=60, deadline=None)
@given(two_particle_states(), unitaries)
def test_unitarity_preserves_norm(state, t):
    assert abs(norm(apply_transform(state, t)) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(two_particle_states(), two_particle_states(), amplitudes, amplitudes, unitaries)
def test_linearity(s1, s2, alpha, beta, t):
    lhs = apply_transform(alpha * s1 + beta * s2, t)
    rhs = alpha * apply_transform(s1, t) + beta * apply_transform(s2, t)
    assert lhs.allclose(rhs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(two_particle_states(), unitaries, unitaries)
def test_composition(state, t1, t2):
    sequential = apply_transform(apply_transform(state, t1), t2)
    assert sequential.allclose(apply_transform(state, compose(t2, t1)), atol=1e-10)


@given(st.lists(st.sampled_from(SMALL.modes), max_size=4), st.randoms())
def test_creation_order_irrelevant(modes, rnd):
    shuffled = list(modes)
    rnd.shuffle(shuffled)
    assert state_from_modes(SMALL, modes) == state_from_modes(SMALL, shuffled)


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.floats(-math.pi, math.pi)] * 4))
def test_probability_completeness(phases):
    out = run(build_yurke_stoler(YsPhases(*phases)))
    all_occ = set()
    for i, j in itertools.combinations_with_replacement(range(8), 2):
        occ = [0] * 8
        occ[i] += 1
        occ[j] += 1
        all_occ.add(tuple(occ))
    assert set(out.terms) <= all_occ
    assert abs(sum(fock_probability(out, o) for o in all_occ) - 1) < 1e-10
