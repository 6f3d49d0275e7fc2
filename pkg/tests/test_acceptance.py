"""Acceptance gate: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see every line.
"""

import math
import time

import numpy as np
from threadpoolctl import threadpool_limits

from conftest import pipeline
from snring.greens import bare_green
from snring.lattice import TightBindingParams, assemble_total_hamiltonian, default_geometry
from snring.observables import contrast, dephasing_rate, transmission
from snring.output import write_records
from snring.selfenergy import (
    AndreevCoupling,
    andreev_self_energy,
    build_lead_broadening,
    lead_self_energy,
)
from snring.svgplot import PlotSpec, SeriesSpec, render_line_plot
from snring.sweeps import (
    SweepConfig,
    fit_distance_slope,
    run_dephasing_vs_mx,
    run_sweep,
    solve_point,
)
from snring.verify import (
    analytic_single_site,
    check_gauge_invariance,
    check_sum_rule,
    single_site_transmission,
)


def report(number, name, passed, detail):
    print(f"ACCEPTANCE {number} {name}: {'PASS' if passed else 'FAIL'} ({detail})",
          flush=True)
    assert passed, f"criterion {number} {name}: {detail}"


def contrast_at(t_ar, energy=0.0):
    _, _, full_a, broadening = pipeline(energy, math.pi, t_ar)
    _, _, full_b, _ = pipeline(energy, 0.0, t_ar)
    return contrast(transmission(full_a, broadening),
                    transmission(full_b, broadening))


def test_criterion_1_zero_coupling_identity():
    start = time.perf_counter()
    config = SweepConfig(experiment="energy_triptych", t_ar=0.0, workers=2)
    records = run_sweep(config)
    with threadpool_limits(limits=1):
        reference = [solve_point(config, r.energy, 0.0, config.mx, config.my,
                                 bypass_contact=True) for r in records]
    worst_t = max(abs(r.t_full_a - ref.t_bare_a)
                  for r, ref in zip(records, reference))
    defined = [(r, ref) for r, ref in zip(records, reference)
               if r.error is None and ref.error is None]
    worst_c = max(abs(r.c_full - ref.c_bare) for r, ref in defined)
    flags_match = all((r.error is None) == (ref.error is None)
                     for r, ref in zip(records, reference))
    elapsed = time.perf_counter() - start
    passed = worst_t <= 1e-12 and worst_c <= 1e-12 and flags_match and elapsed < 30
    report(1, "zero-coupling identity", passed,
           f"max |dT|={worst_t:.2e}, max |dC|={worst_c:.2e}, "
           f"flags_match={flags_match}, {len(records)} energies, {elapsed:.1f}s")


def test_criterion_2_weak_coupling_decoherence():
    start = time.perf_counter()
    c = {t: contrast_at(t) for t in (0.0, 0.1, 0.2, 0.3)}
    gaps = (c[0.0] - c[0.1], c[0.1] - c[0.2], c[0.2] - c[0.3])
    elapsed = time.perf_counter() - start
    passed = all(g > 1e-3 for g in gaps) and elapsed < 10
    report(2, "weak-coupling decoherence", passed,
           f"C={[round(c[t], 4) for t in (0.0, 0.1, 0.2, 0.3)]}, "
           f"gaps={[round(g, 4) for g in gaps]}, {elapsed:.1f}s")


def test_criterion_3_reemergence_of_coherence():
    window = [round(0.4 + 0.02 * k, 2) for k in range(11)]
    c_window = max(contrast_at(t) for t in window)
    c_ref = contrast_at(0.3)
    margin = c_window - c_ref
    passed = margin > 1e-2
    report(3, "reemergence of coherence", passed,
           f"max C[0.4,0.6]={c_window:.4f}, C(0.3)={c_ref:.4f}, margin={margin:+.4f}")


def test_criterion_4_strong_coupling_blocking():
    _, _, full_a, broadening = pipeline(0.0, math.pi, 10.0)
    t_value = transmission(full_a, broadening)
    c_value = contrast_at(10.0)
    passed = abs(t_value - 1.0) <= 0.1 and c_value <= 0.05
    report(4, "strong-coupling blocking", passed,
           f"T={t_value:.4f} (|T-1|={abs(t_value - 1):.4f}), C={c_value:.4f}")


def test_criterion_5_dephasing_distance_law():
    start = time.perf_counter()
    config = SweepConfig(experiment="dephasing_vs_mx", t_ar=0.2, energy=0.0,
                         mx_values=tuple(range(2, 21)),
                         my_values=(6, 14, 22, 30), workers=2)
    records, summary = run_dephasing_vs_mx(config)
    elapsed = time.perf_counter() - start
    slope = summary.slope
    passed = slope is not None and -1.4 <= slope <= -0.6 and elapsed < 300
    report(5, "dephasing distance law", passed,
           f"log-log slope={slope:.3f} over Mx in [2,20], "
           f"{summary.excluded} excluded points, {elapsed:.1f}s")


def test_criterion_6_single_site_oracle():
    worst = max(
        abs(single_site_transmission(0.2, 0.2, 0.0, e)
            - analytic_single_site(0.2, 0.2, 0.0, e))
        for e in np.linspace(-2.0, 2.0, 50)
    )
    passed = worst <= 1e-12
    report(6, "single-site oracle equivalence", passed, f"max |dT|={worst:.2e}")


def test_criterion_7_property_suite():
    failures = []
    params = TightBindingParams()
    ring = default_geometry()
    spacer = default_geometry(mx=3, my=10)

    # residual and dagger pairing at assorted points
    for energy, flux, t_ar, geo in ((0.0, math.pi, 0.2, ring),
                                    (0.7, 1.1, 2.5, ring),
                                    (0.0, math.pi, 0.2, spacer)):
        bare, _, full, _ = pipeline(energy, flux, t_ar, geometry=geo)
        for stage in (bare, full):
            if stage.residual > 1e-10:
                failures.append(f"residual {stage.residual:.2e}")
            dagger = np.abs(stage.g_advanced - stage.g_retarded.conj().T).max()
            if dagger > 1e-13:
                failures.append(f"dagger {dagger:.2e}")

    # LDOS non-negative across the triptych window
    config = SweepConfig(experiment="energy_triptych", n_energies=201, ldos=True)
    records = run_sweep(config)
    ldos_min = min(r.ldos.min() for r in records if r.ldos is not None)
    if ldos_min < -1e-10:
        failures.append(f"ldos min {ldos_min:.2e}")

    # flux symmetry and periodicity of the transmission
    def t_of(flux, geo):
        _, _, full, broadening = pipeline(0.0, flux, 0.2, geometry=geo)
        return transmission(full, broadening)

    for geo in (ring, spacer):
        base = t_of(math.pi / 3, geo)
        if abs(base - t_of(-math.pi / 3, geo)) > 1e-9:
            failures.append("flux mirror")
        if abs(base - t_of(math.pi / 3 + 2 * math.pi, geo)) > 1e-9:
            failures.append("flux period")

    # gauge invariance
    for t_ar in (0.0, 0.2):
        rep = check_gauge_invariance(params, ring, energy=0.0, flux=math.pi,
                                     t_ar=t_ar)
        if not rep.passed:
            failures.append(f"gauge {rep.measured:.2e}")

    # spectral sum rule at zero contact coupling
    rep = check_sum_rule(params, ring, site=0)
    if not rep.passed:
        failures.append(f"sum rule {rep.measured:.2e}")

    # exact quadratic scaling of the contact self-energy
    broadening = build_lead_broadening(ring, 0.2, 0.2)
    ham = assemble_total_hamiltonian(params.with_flux(math.pi), ring)
    bare = bare_green(0.0, ham, lead_self_energy(broadening))
    sc = list(ring.sc_sites)
    diag = bare.g_retarded[sc, sc]
    one = andreev_self_energy(AndreevCoupling(t_ar=0.17), diag, ring)[sc, sc]
    four = andreev_self_energy(AndreevCoupling(t_ar=0.34), diag, ring)[sc, sc]
    if np.abs(four - 4 * one).max() > 1e-14 * np.abs(one).max():
        failures.append("quadratic scaling")

    # perturbative dephasing onset
    rates = {}
    for t_ar in (0.01, 0.02, 0.04):
        _, se, full, brd = pipeline(0.0, math.pi, t_ar)
        rates[t_ar] = dephasing_rate(full, brd, se)[1]
    for t_ar in (0.02, 0.04):
        ratio = rates[t_ar] / (rates[0.01] * (t_ar / 0.01) ** 2)
        if abs(ratio - 1.0) > 0.05:
            failures.append(f"onset ratio {ratio:.3f}")

    report(7, "property suite", not failures,
           "all sub-checks" if not failures else "; ".join(failures))


TRIPTYCH_SPEC = PlotSpec(
    title="Transmission vs energy", x_label="energy", y_label="transmission",
    series=(SeriesSpec("energy", "T_bare_a", "no contact", role="bare"),
            SeriesSpec("energy", "T_full_a", "with contact", role="coupled")))


def _triptych_outputs(tmp_path, workers):
    config = SweepConfig(experiment="energy_triptych", workers=workers)
    records = run_sweep(config)
    csv_path = tmp_path / f"triptych_w{workers}.csv"
    svg_path = tmp_path / f"triptych_w{workers}.svg"
    write_records(records, "csv", csv_path)
    render_line_plot(records, TRIPTYCH_SPEC, svg_path)
    return csv_path.read_bytes(), svg_path.read_bytes()


def test_criterion_8_determinism(tmp_path):
    start = time.perf_counter()
    outputs = {w: _triptych_outputs(tmp_path, w) for w in (1, 4, 8)}
    elapsed = time.perf_counter() - start
    csv_same = outputs[1][0] == outputs[4][0] == outputs[8][0]
    svg_same = outputs[1][1] == outputs[4][1] == outputs[8][1]
    passed = csv_same and svg_same
    report(8, "worker-count determinism", passed,
           f"csv identical={csv_same}, svg identical={svg_same}, {elapsed:.1f}s")


def test_criterion_9_performance_envelope():
    config = SweepConfig(experiment="energy_triptych")
    start = time.perf_counter()
    run_sweep(config)
    serial = time.perf_counter() - start
    start = time.perf_counter()
    run_sweep(SweepConfig(experiment="energy_triptych", workers=4))
    parallel = time.perf_counter() - start
    speedup = serial / parallel
    import os
    cores = len(os.sched_getaffinity(0))
    passed = serial < 60 and speedup >= 3.0
    report(9, "performance envelope", passed,
           f"serial={serial:.1f}s (<60s), speedup at 4 workers={speedup:.2f}x "
           f"(>=3x required, {cores} cores available)")
