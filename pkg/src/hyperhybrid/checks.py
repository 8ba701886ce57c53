"""Self-checks run by ``hyperhybrid check``.

Each check returns a :class:`CheckResult`; none of them raise on a failed
comparison so that the whole report is always produced.
"""

from __future__ import annotations

import cmath
import math
import random
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from hyperhybrid import bell, dsl
from hyperhybrid.circuit import YsPhases, build_yurke_stoler, run, ys_basis
from hyperhybrid.elements import (
    REFLECTION_PHASES,
    HybridBS,
    Raman,
    StandardBS,
    compile_element,
    compile_sequence,
    global_phase_distance,
    hybrid_splitter_pair,
    optical_hybrid_splitter,
)
from hyperhybrid.measurement import (
    ALL_DOF_PAIRS,
    TSIRELSON,
    ChshSettings,
    Dof,
    chsh,
    correlation,
    postselect_coincidence,
    scan_chsh,
    ys_output,
    ys_table,
)
from hyperhybrid.modes import KetState, Mode, Spin, apply_transform, norm, product_basis, state_from_modes

DOWN, UP = Spin.DOWN, Spin.UP


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def expanded_output(phases: YsPhases) -> KetState:
    """Output state written directly as a product of two single-particle brackets."""
    e = lambda phi: cmath.exp(1j * phi)  # noqa: E731
    first = {
        Mode(DOWN, "R"): e(phases.phi_r), Mode(UP, "U"): 1j * e(phases.phi_r),
        Mode(UP, "D"): 1j * e(phases.phi_d), Mode(DOWN, "L"): -e(phases.phi_d),
    }
    second = {
        Mode(DOWN, "L"): e(phases.phi_l), Mode(UP, "D"): 1j * e(phases.phi_l),
        Mode(UP, "U"): 1j * e(phases.phi_u), Mode(DOWN, "R"): -e(phases.phi_u),
    }
    basis = ys_basis()
    terms = defaultdict(complex)
    for m1, c1 in first.items():
        for m2, c2 in second.items():
            occ = [0] * len(basis)
            occ[basis.index_of(m1)] += 1
            occ[basis.index_of(m2)] += 1
            terms[tuple(occ)] += c1 * c2 / 4
    return KetState(basis, terms)


def table_pattern(alice_dof: Dof, bob_dof: Dof, total: float) -> np.ndarray:
    """Expected ``[alice, bob]`` table under the default sign convention.

    The +/+ and -/- entries carry ``sin^2(total)/4`` whenever Alice reads
    her path and ``cos^2(total)/4`` whenever she reads her spin.
    """
    s2, c2 = math.sin(total) ** 2 / 4, math.cos(total) ** 2 / 4
    diag, off = (s2, c2) if Dof(alice_dof) == Dof.EXTERNAL else (c2, s2)
    return np.array([[diag, off], [off, diag]])


def correlator_sign(alice_dof: Dof, bob_dof: Dof) -> int:
    """Sign ``s`` in ``E = s * cos(2 * total)``; only Alice's choice matters."""
    return -1 if Dof(alice_dof) == Dof.EXTERNAL else 1


def _grid():
    return [k * math.pi / 8 for k in range(17)]


def check_output_state(samples: int = 100, seed: int = 7) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        ph = YsPhases(*(rng.uniform(-math.pi, math.pi) for _ in range(4)))
        got, want = run(build_yurke_stoler(ph)), expanded_output(ph)
        keys = set(got.terms) | set(want.terms)
        worst = max(worst, max(abs(got.amplitude(k) - want.amplitude(k)) for k in keys))
    return CheckResult("output state", worst <= 1e-10, f"max amplitude error {worst:.2e} over {samples} phase tuples")


def check_tables() -> CheckResult:
    worst = 0.0
    for total2 in (0, math.pi / 2, math.pi, 3 * math.pi / 2):
        for phi_u in _grid()[:3]:
            ph = YsPhases(phi_u=phi_u, phi_d=total2 - phi_u)
            for a, b in ALL_DOF_PAIRS:
                err = np.abs(ys_table(ph, a, b).p - table_pattern(a, b, ph.total)).max()
                worst = max(worst, float(err))
    return CheckResult("outcome tables", worst <= 1e-10, f"max entry error {worst:.2e}")


def check_correlators() -> CheckResult:
    worst = 0.0
    for t in _grid():
        ph = YsPhases(phi_d=t)
        for a, b in ALL_DOF_PAIRS:
            e = correlation(ys_table(ph, a, b))
            worst = max(worst, abs(e - correlator_sign(a, b) * math.cos(2 * ph.total)))
    return CheckResult("correlators", worst <= 1e-10, f"max error {worst:.2e} on a 17-point grid")


def check_coincidence_rate() -> CheckResult:
    worst = 0.0
    for t in _grid():
        w = sum(p for _, p in postselect_coincidence(ys_output(YsPhases(phi_d=t, phi_u=0.3 * t))))
        worst = max(worst, abs(w - 0.5))
    return CheckResult("coincidence rate", worst <= 1e-10, f"max |weight - 1/2| {worst:.2e}")


def check_no_signaling() -> CheckResult:
    worst = 0.0
    for t in _grid():
        for a, b in ALL_DOF_PAIRS:
            table = ys_table(YsPhases(phi_d=t, phi_r=-0.4 * t), a, b)
            worst = max(worst, np.abs(table.alice_marginal() - 0.5).max(), np.abs(table.bob_marginal() - 0.5).max())
    return CheckResult("no-signaling", worst <= 1e-10, f"max marginal deviation {worst:.2e}")


def check_hom() -> CheckResult:
    basis = product_basis([DOWN], ["1", "2"])
    out = apply_transform(state_from_modes(basis, [Mode(DOWN, "1"), Mode(DOWN, "2")]),
                          compile_element(StandardBS(("1", "2")), basis))
    coinc = abs(out.amplitude((1, 1))) ** 2
    bunch = [abs(out.amplitude(o)) ** 2 * 2 for o in ((2, 0), (0, 2))]
    ok = coinc <= 1e-12 and all(abs(p - 0.5) <= 1e-10 for p in bunch)
    return CheckResult("Hong-Ou-Mandel", ok, f"coincidence {coinc:.1e}, bunching {bunch[0]:.6f}/{bunch[1]:.6f}")


def check_bell_analyzers() -> CheckResult:
    std = {b: bell.analyzer_distribution(b, "standard") for b in bell.BellStateId}
    hyb = {b: bell.analyzer_distribution(b, "hybrid") for b in bell.BellStateId}
    B = bell.BellStateId
    ok = (
        std[B.PHI_PLUS] == std[B.PHI_MINUS]
        and hyb[B.PSI_PLUS] == hyb[B.PSI_MINUS]
        and bell.conclusively_identified("standard") == {B.PSI_MINUS, B.PSI_PLUS}
        and bell.conclusively_identified("hybrid") == {B.PHI_MINUS, B.PHI_PLUS}
        and all(abs(sum(d.values()) - 1) <= 1e-10 for d in (*std.values(), *hyb.values()))
    )
    return CheckResult("Bell analyzers", ok, "standard resolves Psi+/-, hybrid resolves Phi+/-")


def check_optical_decomposition() -> CheckResult:
    basis = product_basis([DOWN, UP], ["R", "U"])
    target = compile_sequence(hybrid_splitter_pair("R", "U"), basis).matrix
    found = {}
    for crossed in (False, True):
        for token, r in REFLECTION_PHASES.items():
            dist, _ = global_phase_distance(compile_sequence(optical_hybrid_splitter("R", "U", r, crossed), basis).matrix, target)
            if dist <= 1e-12:
                found.setdefault(crossed, token)
    detail = (f"straight arms: {'rphase=' + found[False] if False in found else 'no reflection phase'}; "
              f"crossed arms: {'rphase=' + found[True] if True in found else 'no reflection phase'}")
    return CheckResult("PBS/QWP/PBS = hybrid splitter", False in found, detail)


def check_raman() -> CheckResult:
    basis = product_basis([DOWN, UP], ["p", "q"])
    pair = (Mode(DOWN, "p"), Mode(UP, "q"))
    raman = compile_element(Raman(pair, math.pi / 2, 0.0), basis).block(pair)
    hbs = compile_element(HybridBS(pair), basis).block(pair)
    err = float(np.abs(raman - hbs).max())
    return CheckResult("Raman pi/2 pulse", err <= 1e-12, f"max entry difference {err:.1e}")


def check_parser() -> CheckResult:
    circuit = build_yurke_stoler()
    text = dsl.render(circuit)
    again = dsl.parse(text)
    ok = again == circuit and dsl.render(again) == text
    return CheckResult("parser round trip", ok, "rendered interferometer reparses to an equal circuit")


def check_tsirelson(resolution: int = 16) -> CheckResult:
    maxima = {f"{a.value}/{b.value}": scan_chsh(resolution, a, b).max_abs_s for a, b in ALL_DOF_PAIRS}
    exact = abs(chsh(ChshSettings(0, math.pi / 2, math.pi / 4, -math.pi / 4)).s_value)
    ok = all(abs(v - TSIRELSON) <= 5e-3 for v in maxima.values()) and abs(exact - TSIRELSON) <= 1e-9
    shown = ", ".join(f"{k}={v:.6f}" for k, v in maxima.items())
    return CheckResult("Tsirelson saturation", ok, f"scan maxima {shown}; exact settings |S|={exact:.12f}")


def check_norm() -> CheckResult:
    worst = max(abs(norm(ys_output(YsPhases(phi_d=t, phi_l=0.2, phi_u=-t))) - 1) for t in _grid())
    return CheckResult("norm preservation", worst <= 1e-10, f"max |norm - 1| {worst:.1e}")


ALL_CHECKS = (
    check_norm,
    check_output_state,
    check_tables,
    check_correlators,
    check_coincidence_rate,
    check_no_signaling,
    check_hom,
    check_bell_analyzers,
    check_optical_decomposition,
    check_raman,
    check_parser,
    check_tsirelson,
)


def run_checks() -> list:
    return [check() for check in ALL_CHECKS]
