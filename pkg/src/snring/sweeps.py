"""Sweep harness: grid construction, per-point solves, parallel execution.

Each grid point is an independent pure function of the configuration, so
results are deterministic for any worker count; records are merged in grid
order.  BLAS is pinned to one thread for the duration of a sweep, which
keeps per-point arithmetic identical between the serial and process-pool
paths and lets workers scale without oversubscription.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import (
    AggregationError,
    ConfigError,
    ContrastUndefinedError,
    SnRingError,
)
from .greens import bare_green, full_green
from .lattice import (
    Geometry,
    TightBindingParams,
    assemble_total_hamiltonian,
    default_geometry,
)
from .observables import (
    ObservableRecord,
    contrast,
    dephasing_rate,
    ldos_vector,
    transmission,
)
from .selfenergy import (
    AndreevCoupling,
    build_lead_broadening,
    lead_self_energy,
    self_energy_set,
)

EXPERIMENTS = ("energy_triptych", "contrast_vs_tar", "dephasing_vs_mx", "single_point")

SLOPE_FIT_RANGE = (2, 20)


def _default_t_ar_values() -> tuple[float, ...]:
    return tuple(round(0.02 * k, 10) for k in range(151))


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved inputs for one experiment run."""

    experiment: str = "single_point"
    # geometry
    n_ring: int = 100
    mx: int = 0
    my: int = 10
    lead_rank: int = 20
    lead_i_sites: Optional[tuple[int, ...]] = None
    lead_ii_sites: Optional[tuple[int, ...]] = None
    sc_sites: Optional[tuple[int, ...]] = None
    ring_contact_sites: Optional[tuple[int, ...]] = None
    # tight-binding / coupling parameters
    eps_ring: float = 0.0
    t_ring: float = -1.0
    eps_spacer: float = 0.0
    t_x: float = -1.0
    t_y: float = -1.0
    t_x_prime: float = -1.0
    gamma_i: float = 0.2
    gamma_ii: float = 0.2
    delta_abs: float = 1.0
    g: float = 1.0
    t_ar: float = 0.2
    # grids
    energy: float = 0.0
    e_min: float = -3.0
    e_max: float = 3.0
    n_energies: int = 2001
    flux_a: float = math.pi
    flux_b: float = 0.0
    t_ar_values: tuple[float, ...] = field(default_factory=_default_t_ar_values)
    mx_values: tuple[int, ...] = tuple(range(1, 21))
    my_values: tuple[int, ...] = (6, 14, 22, 30)
    # execution and output
    workers: int = 1
    ldos: bool = False
    out_format: str = "csv"
    plot: bool = False
    out_dir: str = "out"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.n_energies < 1:
            raise ConfigError("n_energies must be >= 1")
        if self.e_min > self.e_max:
            raise ConfigError("e_min must not exceed e_max")
        if self.t_ar < 0 or any(t < 0 for t in self.t_ar_values):
            raise ConfigError("Andreev couplings must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.out_format!r}")
        if self.experiment == "dephasing_vs_mx":
            if any(v < 1 for v in self.mx_values) or any(v < 1 for v in self.my_values):
                raise ConfigError("spacer experiments need mx, my >= 1")
            # fixed site sets cannot follow the geometry across the sweep
            if self.sc_sites is not None or self.ring_contact_sites is not None:
                raise ConfigError(
                    "dephasing_vs_mx derives sc/contact sites per (mx, my); "
                    "remove the explicit overrides"
                )
            if self.ldos:
                raise ConfigError(
                    "LDOS columns need a fixed device size; disable ldos for "
                    "dephasing_vs_mx"
                )
        self.geometry()  # validate the base layout eagerly

    def geometry(self, mx: Optional[int] = None, my: Optional[int] = None) -> Geometry:
        """Device layout, with optional (mx, my) override for spacer sweeps."""
        mx = self.mx if mx is None else mx
        my = self.my if my is None else my
        base = default_geometry(self.n_ring, mx=mx, my=my, lead_rank=self.lead_rank)
        fields = {}
        if self.lead_i_sites is not None:
            fields["lead_i_sites"] = self.lead_i_sites
        if self.lead_ii_sites is not None:
            fields["lead_ii_sites"] = self.lead_ii_sites
        if self.sc_sites is not None:
            fields["sc_sites"] = self.sc_sites
        if self.ring_contact_sites is not None:
            fields["ring_contact_sites"] = self.ring_contact_sites
        return replace(base, **fields) if fields else base

    def params(self, flux: float) -> TightBindingParams:
        return TightBindingParams(
            eps_ring=self.eps_ring, t_ring=self.t_ring, eps_spacer=self.eps_spacer,
            t_x=self.t_x, t_y=self.t_y, t_x_prime=self.t_x_prime, flux=flux,
        )

    def coupling(self, t_ar: Optional[float] = None) -> AndreevCoupling:
        return AndreevCoupling(
            t_ar=self.t_ar if t_ar is None else t_ar,
            delta_abs=self.delta_abs, g=self.g,
        )


def solve_point(config: SweepConfig, energy: float, t_ar: float,
                mx: int, my: int, want_ldos: bool = False,
                bypass_contact: bool = False) -> ObservableRecord:
    """Solve one grid point: both flux values, bare and full stages.

    ``bypass_contact`` short-circuits the contact self-energy entirely (the
    reference pipeline for the zero-coupling identity); the full-stage fields
    are then copies of the bare stage.
    """
    record = ObservableRecord(energy=energy, flux_a=config.flux_a,
                              flux_b=config.flux_b, t_ar=t_ar, mx=mx, my=my)
    try:
        geometry = config.geometry(mx, my)
        broadening = build_lead_broadening(geometry, config.gamma_i, config.gamma_ii)
        sigma_leads = lead_self_energy(broadening)
        coupling = None if bypass_contact else config.coupling(t_ar)
        stages = {}
        for tag, flux in (("a", config.flux_a), ("b", config.flux_b)):
            ham = assemble_total_hamiltonian(config.params(flux), geometry)
            bare = bare_green(energy, ham, sigma_leads)
            if bypass_contact:
                se, full = None, bare
            else:
                se = self_energy_set(broadening, coupling, bare, geometry)
                full = full_green(energy, ham, se)
            stages[tag] = (bare, se, full)
            setattr(record, f"t_bare_{tag}", transmission(bare, broadening))
            setattr(record, f"t_full_{tag}", transmission(full, broadening))
        bare_a, se_a, full_a = stages["a"]
        if want_ldos:
            record.ldos = ldos_vector(full_a)
        if bypass_contact:
            record.dephasing = 0.0 + 0.0j
            record.rate = 0.0
        else:
            record.dephasing, record.rate = dephasing_rate(full_a, broadening, se_a)
    except SnRingError as exc:
        record.error = type(exc).__name__
        return record
    try:
        record.c_bare = contrast(record.t_bare_a, record.t_bare_b)
        record.c_full = contrast(record.t_full_a, record.t_full_b)
    except ContrastUndefinedError as exc:
        record.error = type(exc).__name__
    try:
        record.validate()
    except SnRingError as exc:
        record.error = type(exc).__name__
    return record


def _grid(config: SweepConfig) -> list[tuple[float, float, int, int]]:
    """(energy, t_ar, mx, my) tuple per grid point, in record order."""
    if config.experiment == "energy_triptych":
        energies = np.linspace(config.e_min, config.e_max, config.n_energies)
        return [(float(e), config.t_ar, config.mx, config.my) for e in energies]
    if config.experiment == "contrast_vs_tar":
        return [(config.energy, float(t), config.mx, config.my)
                for t in config.t_ar_values]
    if config.experiment == "dephasing_vs_mx":
        return [(config.energy, config.t_ar, mx, my)
                for mx in config.mx_values for my in config.my_values]
    return [(config.energy, config.t_ar, config.mx, config.my)]


def _point_task(config: SweepConfig, want_ldos: bool,
                point: tuple[float, float, int, int]) -> ObservableRecord:
    energy, t_ar, mx, my = point
    return solve_point(config, energy, t_ar, mx, my, want_ldos=want_ldos)


def run_sweep(config: SweepConfig, want_ldos: Optional[bool] = None) -> list[ObservableRecord]:
    """Run the configured experiment and return records in grid order."""
    points = _grid(config)
    if want_ldos is None:
        want_ldos = config.ldos or (config.plot and config.experiment == "energy_triptych")
    task = partial(_point_task, config, want_ldos)
    with threadpool_limits(limits=1):
        if config.workers == 1 or len(points) < 2:
            return [task(p) for p in points]
        chunk = max(1, len(points) // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(task, points, chunksize=chunk))


def run_energy_triptych(config: SweepConfig) -> list[ObservableRecord]:
    if config.experiment != "energy_triptych":
        config = replace(config, experiment="energy_triptych")
    return run_sweep(config)


def run_contrast_vs_tar(config: SweepConfig) -> list[ObservableRecord]:
    if config.experiment != "contrast_vs_tar":
        config = replace(config, experiment="contrast_vs_tar")
    return run_sweep(config)


@dataclass
class DephasingSummary:
    """Distance sweep digest: per-mx averages, log-log slope, exclusions."""

    averaged: list[tuple[int, float]]
    slope: Optional[float]
    excluded: int


def my_average(records: Sequence[ObservableRecord],
               my_values: Sequence[int]) -> tuple[list[tuple[int, float]], int]:
    """Arithmetic mean of the dephasing rate over the my list, per mx.

    The grid must contain every (mx, my) combination; points that failed are
    excluded from the mean and counted.  Returns (averaged series, excluded).
    """
    expected = set(my_values)
    groups: dict[int, dict[int, ObservableRecord]] = {}
    for rec in records:
        groups.setdefault(rec.mx, {})[rec.my] = rec
    excluded = 0
    averaged = []
    for mx in sorted(groups):
        present = set(groups[mx])
        if present != expected:
            raise AggregationError(
                f"mx={mx} has my set {sorted(present)}, expected {sorted(expected)}"
            )
        rates = []
        for my in my_values:
            rec = groups[mx][my]
            if rec.error is not None or not np.isfinite(rec.rate):
                excluded += 1
                continue
            rates.append(rec.rate)
        if rates:
            averaged.append((mx, float(np.mean(rates))))
    return averaged, excluded


def fit_distance_slope(averaged: Sequence[tuple[int, float]],
                       lo: int = SLOPE_FIT_RANGE[0],
                       hi: int = SLOPE_FIT_RANGE[1]) -> Optional[float]:
    """Least-squares slope of log(rate) vs log(mx) over mx in [lo, hi]."""
    xs = [mx for mx, r in averaged if lo <= mx <= hi and r > 0]
    ys = [r for mx, r in averaged if lo <= mx <= hi and r > 0]
    if len(xs) < 2:
        return None
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    return float(slope)


def run_dephasing_vs_mx(config: SweepConfig) -> tuple[list[ObservableRecord], DephasingSummary]:
    if config.experiment != "dephasing_vs_mx":
        config = replace(config, experiment="dephasing_vs_mx")
    records = run_sweep(config)
    averaged, excluded = my_average(records, config.my_values)
    summary = DephasingSummary(
        averaged=averaged,
        slope=fit_distance_slope(averaged),
        excluded=excluded,
    )
    return records, summary


def run_single_point(config: SweepConfig) -> list[ObservableRecord]:
    if config.experiment != "single_point":
        config = replace(config, experiment="single_point")
    return run_sweep(config)
