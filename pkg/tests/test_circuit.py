import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhybrid.circuit import Circuit, YsPhases, build_yurke_stoler, run, ys_basis
from hyperhybrid.elements import Custom, HybridBS, Phase, QuarterWave, StandardBS, compile_element
from hyperhybrid.errors import UnknownPath
from hyperhybrid.measurement import ALL_DOF_PAIRS, outcome_table
from hyperhybrid.modes import Mode, norm, state_from_modes
from oracles import symbolic_output

dR, dL = Mode.parse("down@R"), Mode.parse("down@L")


def test_zero_phase_output_matches_symbolic_expansion(basis8):
    out = run(build_yurke_stoler())
    assert out.allclose(symbolic_output(basis8), atol=1e-12)


def test_zero_phase_output_amplitudes(basis8):
    out = run(build_yurke_stoler())
    got = {k: complex(*v) for k, v in out.to_json().items()}
    assert got == pytest.approx({
        "down@R:1,down@L:1": 0.5,
        "down@R:2": -0.25,
        "down@L:2": -0.25,
        "up@U:1,up@D:1": -0.5,
        "up@U:2": -0.25,
        "up@D:2": -0.25,
    }, abs=1e-15)


def test_pi_on_d_matches_symbolic(basis8):
    out = run(build_yurke_stoler(YsPhases(phi_d=math.pi)))
    want = symbolic_output(basis8, phi_d=math.pi)
    assert out.allclose(want, atol=1e-12)


def test_random_phases_match_symbolic(basis8):
    rng = random.Random(11)
    for _ in range(100):
        ph = [rng.uniform(-math.pi, math.pi) for _ in range(4)]
        out = run(build_yurke_stoler(YsPhases(*ph)))
        assert out.allclose(symbolic_output(basis8, *ph), atol=1e-10)


@pytest.mark.parametrize("phases", [YsPhases(), YsPhases(1, 2, 3, 4), YsPhases(-0.3, 0.0, 2.2, -1.9)])
def test_output_norm(phases):
    assert abs(norm(run(build_yurke_stoler(phases))) - 1) < 1e-10


def test_empty_circuit_returns_input(basis8):
    circuit = Circuit(basis8, (dR, dL))
    assert run(circuit) == state_from_modes(basis8, [dR, dL])


def test_single_hybrid_splitter_on_r_particle(basis8):
    circuit = Circuit(basis8, (dR, dL), (HybridBS((dR, Mode.parse("up@D"))),))
    out = run(circuit)
    got = {k: complex(*v) for k, v in out.to_json().items()}
    assert got == pytest.approx({"down@R:1,down@L:1": 1 / math.sqrt(2), "down@L:1,up@D:1": 1j / math.sqrt(2)}, abs=1e-15)


def test_bad_element_carries_index(basis8):
    with pytest.raises(UnknownPath) as info:
        Circuit(basis8, (dR,), (Phase("R", 0.0), Phase("Z", 1.0)))
    assert info.value.element_index == 1
    assert "element 1" in str(info.value)


def test_party_splitter_order_is_immaterial(basis8):
    base = build_yurke_stoler(YsPhases(0.4, -1.0, 0.9, 2.5))
    e = list(base.elements)
    swapped = e[1:2] + e[0:1] + e[2:6] + e[7:8] + e[6:7]
    assert run(base.with_elements(swapped)).allclose(run(base), atol=1e-14)
    for i, j in ((0, 1), (6, 7)):
        a, b = compile_element(e[i], basis8).matrix, compile_element(e[j], basis8).matrix
        np.testing.assert_allclose(a @ b, b @ a, atol=1e-15)


def test_path_only_second_layer_erases_interference():
    # The measured-DOF-only splitters cannot merge (down, L) with (up, D): the
    # two paths into each final splitter differ in both DOF, so the
    # coincidence tables lose all phase dependence.
    for phases in (YsPhases(), YsPhases(phi_d=0.7, phi_u=0.2), YsPhases(phi_u=math.pi / 2)):
        base = build_yurke_stoler(phases)
        reference = run(base)
        ext = run(base.with_elements(base.elements[:6] + (StandardBS(("L", "D")), StandardBS(("R", "U")))))
        spin = run(base.with_elements(base.elements[:6] + tuple(QuarterWave(p) for p in "LDRU")))
        flat = np.full((2, 2), 1 / 8)
        np.testing.assert_allclose(outcome_table(ext, alice_dof="external", bob_dof="external").p, flat, atol=1e-12)
        np.testing.assert_allclose(outcome_table(spin, alice_dof="spin", bob_dof="spin").p, flat, atol=1e-12)
        # the hybrid second layer keeps the full phase dependence
        assert outcome_table(reference).p[0, 0] == pytest.approx(math.sin(phases.total) ** 2 / 4, abs=1e-12)


def test_second_layer_replacement_changes_tables_somewhere():
    phases = YsPhases()
    base = build_yurke_stoler(phases)
    ext = run(base.with_elements(base.elements[:6] + (StandardBS(("L", "D")), StandardBS(("R", "U")))))
    diffs = [
        np.abs(outcome_table(ext, alice_dof=a, bob_dof=b).p - outcome_table(run(base), alice_dof=a, bob_dof=b).p).max()
        for a, b in ALL_DOF_PAIRS
    ]
    assert max(diffs) == pytest.approx(1 / 8, abs=1e-12)


def _swap(a, b):
    return Custom((Mode.parse(a), Mode.parse(b)), [[0, 1], [1, 0]])


# Alice's arms carry (down, L) and (up, D); Bob's carry (down, R) and (up, U).
# Aligning the unmeasured DOF first lets a single-DOF splitter do the job.
ALIGNED = {
    "alice": {"external": [_swap("down@D", "up@D"), StandardBS(("L", "D"))],
              "spin": [_swap("up@D", "up@L"), QuarterWave("L")]},
    "bob": {"external": [_swap("down@U", "up@U"), StandardBS(("R", "U"))],
            "spin": [_swap("up@U", "up@R"), QuarterWave("R")]},
}


@settings(max_examples=25, deadline=None)
@given(st.tuples(*[st.floats(-math.pi, math.pi)] * 4))
def test_aligned_single_dof_second_layer_keeps_tables(phases):
    base = build_yurke_stoler(YsPhases(*phases))
    reference = run(base)
    for a, b in ALL_DOF_PAIRS:
        tail = ALIGNED["alice"][a.value] + ALIGNED["bob"][b.value]
        out = run(base.with_elements(base.elements[:6] + tuple(tail)))
        np.testing.assert_allclose(outcome_table(out, alice_dof=a, bob_dof=b).p,
                                   outcome_table(reference, alice_dof=a, bob_dof=b).p, atol=1e-10)


def test_ys_basis_order():
    assert [str(m) for m in ys_basis()][:4] == ["down@R", "down@L", "down@U", "down@D"]
