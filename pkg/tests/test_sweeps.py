import math

import numpy as np
import pytest

from snring.errors import AggregationError, ConfigError
from snring.observables import ObservableRecord
from snring.sweeps import (
    SweepConfig,
    fit_distance_slope,
    my_average,
    run_contrast_vs_tar,
    run_dephasing_vs_mx,
    run_sweep,
    solve_point,
)


def small_triptych(**kwargs):
    return SweepConfig(experiment="energy_triptych", e_min=-0.5, e_max=0.5,
                       n_energies=21, **kwargs)


class TestGrid:
    def test_triptych_record_count_and_order(self):
        records = run_sweep(small_triptych())
        assert len(records) == 21
        energies = [r.energy for r in records]
        assert energies == sorted(energies)
        for r in records:
            for field in ("t_bare_a", "t_bare_b", "t_full_a", "t_full_b"):
                assert np.isfinite(getattr(r, field))

    def test_every_point_yields_exactly_one_record(self):
        # includes the decoupled-zero-mode points, which must arrive flagged
        config = SweepConfig(experiment="dephasing_vs_mx",
                             mx_values=(3, 4, 5), my_values=(6, 14))
        records = run_sweep(config)
        assert len(records) == 6
        keys = [(r.mx, r.my) for r in records]
        assert keys == [(3, 6), (3, 14), (4, 6), (4, 14), (5, 6), (5, 14)]
        flagged = {(r.mx, r.my) for r in records if r.error}
        assert flagged == {(3, 14), (5, 6)}

    def test_single_point(self):
        records = run_sweep(SweepConfig(experiment="single_point"))
        assert len(records) == 1 and records[0].error is None


class TestZeroCouplingIdentity:
    def test_full_equals_bare_at_zero(self):
        records = run_sweep(small_triptych(t_ar=0.0))
        for r in records:
            assert abs(r.t_full_a - r.t_bare_a) <= 1e-12
            assert abs(r.t_full_b - r.t_bare_b) <= 1e-12
            assert abs(r.c_full - r.c_bare) <= 1e-12

    def test_bypass_pipeline_is_bitwise_identical(self):
        from threadpoolctl import threadpool_limits

        config = small_triptych(t_ar=0.0)
        normal = run_sweep(config)
        with threadpool_limits(limits=1):  # match run_sweep's BLAS pinning
            for r in normal:
                ref = solve_point(config, r.energy, 0.0, config.mx, config.my,
                                  bypass_contact=True)
                assert ref.t_bare_a == r.t_full_a
                assert ref.t_bare_b == r.t_full_b
                assert ref.c_bare == r.c_full


class TestTriptychPhysics:
    def test_contact_suppresses_contrast_near_band_center(self):
        bare = run_sweep(small_triptych(t_ar=0.0))
        coupled = run_sweep(small_triptych(t_ar=0.2))
        mean_bare = np.mean([r.c_full for r in bare])
        mean_coupled = np.mean([r.c_full for r in coupled])
        assert mean_coupled < mean_bare


class TestContrastSweep:
    def test_strong_coupling_endpoint(self):
        config = SweepConfig(experiment="contrast_vs_tar",
                             t_ar_values=(0.0, 0.3, 10.0))
        records = run_contrast_vs_tar(config)
        c = {r.t_ar: r.c_full for r in records}
        assert c[0.0] > c[0.3]
        assert c[10.0] < 0.05

    def test_deterministic_across_workers(self):
        config = SweepConfig(experiment="contrast_vs_tar",
                             t_ar_values=tuple(0.1 * k for k in range(8)))
        serial = run_contrast_vs_tar(config)
        parallel = run_contrast_vs_tar(
            SweepConfig(experiment="contrast_vs_tar",
                        t_ar_values=tuple(0.1 * k for k in range(8)), workers=4))
        for a, b in zip(serial, parallel):
            assert a.t_full_a == b.t_full_a
            assert a.c_full == b.c_full
            assert a.rate == b.rate


class TestMyAverage:
    @staticmethod
    def rec(mx, my, rate, error=None):
        return ObservableRecord(energy=0, flux_a=math.pi, flux_b=0, t_ar=0.2,
                                mx=mx, my=my, rate=rate, error=error)

    def test_two_values(self):
        averaged, excluded = my_average(
            [self.rec(2, 6, 1.0), self.rec(2, 14, 3.0)], (6, 14))
        assert averaged == [(2, 2.0)] and excluded == 0

    def test_single_my_identity(self):
        averaged, _ = my_average([self.rec(4, 6, 0.7)], (6,))
        assert averaged == [(4, 0.7)]

    def test_matches_hand_computed_mean(self):
        config = SweepConfig(experiment="dephasing_vs_mx",
                             mx_values=(5,), my_values=(6, 14, 22, 30))
        records, summary = run_dephasing_vs_mx(config)
        rates = [r.rate for r in records if r.error is None]
        assert len(summary.averaged) == 1
        mx, mean = summary.averaged[0]
        assert mx == 5
        assert mean == pytest.approx(sum(rates) / len(rates), abs=1e-14)

    def test_ragged_grouping_rejected(self):
        with pytest.raises(AggregationError):
            my_average([self.rec(2, 6, 1.0)], (6, 14))

    def test_failed_points_excluded_and_counted(self):
        records = [self.rec(2, 6, 1.0), self.rec(2, 14, float("nan"), "SolverError")]
        averaged, excluded = my_average(records, (6, 14))
        assert averaged == [(2, 1.0)] and excluded == 1


class TestSlopeFit:
    def test_recovers_exact_power_law(self):
        series = [(mx, 3.7 * mx ** -1.25) for mx in range(2, 21)]
        assert fit_distance_slope(series) == pytest.approx(-1.25, abs=1e-12)

    def test_window_excludes_contact_dominated_point(self):
        series = [(1, 1e6)] + [(mx, 2.0 / mx) for mx in range(2, 21)]
        assert fit_distance_slope(series) == pytest.approx(-1.0, abs=1e-12)

    def test_too_few_points(self):
        assert fit_distance_slope([(5, 1.0)]) is None


class TestConfigValidation:
    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            SweepConfig(experiment="what")

    def test_descending_energy_window(self):
        with pytest.raises(ConfigError):
            SweepConfig(e_min=1.0, e_max=-1.0)

    def test_negative_coupling_list(self):
        with pytest.raises(ConfigError):
            SweepConfig(t_ar_values=(-0.1,))

    def test_dephasing_rejects_pinned_sites(self):
        with pytest.raises(ConfigError):
            SweepConfig(experiment="dephasing_vs_mx", sc_sites=(20, 21))

    def test_single_point_dephasing_matches_direct_pipeline(self):
        config = SweepConfig(experiment="single_point", mx=2, my=6)
        record = run_sweep(config)[0]
        assert record.error is None
        assert record.rate > 0
