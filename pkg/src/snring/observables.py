"""Transport observables: transmission, flux contrast, LDOS, dephasing rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ContrastUndefinedError,
    InjectionStarvedError,
    NumericalConsistencyError,
)
from .greens import GreensFunctions
from .selfenergy import LeadBroadening, SelfEnergySet

TRACE_IMAG_TOL = 1e-10
CONTRAST_FLOOR = 1e-14
INJECTION_FLOOR = 1e-14


@dataclass
class ObservableRecord:
    """One sweep-grid point.

    ``t_bare_*``/``t_full_*`` are transmissions without/with the
    superconducting contact at the two flux values; ``dephasing`` is the
    complex trace ratio whose -2*imag part is ``rate``.  ``ldos`` (full
    stage, flux_a) is present only when the sweep asked for it.  ``error``
    is None for a clean point, else a short failure tag.
    """

    energy: float
    flux_a: float
    flux_b: float
    t_ar: float
    mx: int
    my: int
    t_bare_a: float = np.nan
    t_bare_b: float = np.nan
    t_full_a: float = np.nan
    t_full_b: float = np.nan
    c_bare: float = np.nan
    c_full: float = np.nan
    dephasing: complex = complex(np.nan, np.nan)
    rate: float = np.nan
    ldos: Optional[np.ndarray] = None
    error: Optional[str] = None

    def validate(self):
        for name in ("t_bare_a", "t_bare_b", "t_full_a", "t_full_b"):
            value = getattr(self, name)
            if np.isfinite(value) and value < -1e-12:
                raise NumericalConsistencyError(f"{name} = {value:.3e} < 0")
        for name in ("c_bare", "c_full"):
            value = getattr(self, name)
            if np.isfinite(value) and not -1e-12 <= value <= 2 + 1e-12:
                raise NumericalConsistencyError(f"{name} = {value:.3e} outside [0, 2]")
        if self.ldos is not None and self.ldos.min() < -1e-10:
            raise NumericalConsistencyError(f"LDOS minimum {self.ldos.min():.3e} < 0")
        return self


def transmission(greens: GreensFunctions, broadening: LeadBroadening) -> float:
    """Tr[Gamma_I G^R Gamma_II G^A], the source-to-drain probability.

    The trace is computed in complex arithmetic; the imaginary residue must
    stay below tolerance and the real part is returned.
    """
    lead_i = list(broadening.lead_i_sites)
    lead_ii = list(broadening.lead_ii_sites)
    gr = greens.g_retarded[np.ix_(lead_i, lead_ii)]
    ga = greens.g_advanced[np.ix_(lead_ii, lead_i)]
    trace = broadening.gamma_i * broadening.gamma_ii * np.einsum("nm,mn->", gr, ga)
    if abs(trace.imag) > TRACE_IMAG_TOL:
        raise NumericalConsistencyError(
            f"transmission trace has imaginary part {trace.imag:.3e}"
        )
    return float(trace.real)


def contrast(t_a: float, t_b: float) -> float:
    """2 |T_a - T_b| / (T_a + T_b), the interference visibility of the pair."""
    if t_a < CONTRAST_FLOOR and t_b < CONTRAST_FLOOR:
        raise ContrastUndefinedError(
            f"both transmissions below {CONTRAST_FLOOR:.0e}: {t_a:.3e}, {t_b:.3e}"
        )
    return 2.0 * abs(t_a - t_b) / (t_a + t_b)


def contrast_between(energy: float, flux_a: float, flux_b: float,
                     transmission_fn) -> float:
    """Contrast of the two transmissions a pipeline produces at one energy.

    ``transmission_fn(energy, flux)`` must hold every other parameter fixed.
    """
    return contrast(transmission_fn(energy, flux_a),
                    transmission_fn(energy, flux_b))


def ldos(greens: GreensFunctions, site: int) -> float:
    """Diagonal spectral weight <site| A |site>."""
    n = greens.spectral.shape[0]
    if not 0 <= site < n:
        raise IndexError(f"site {site} outside device of {n} sites")
    return float(greens.spectral[site, site].real)


def ldos_vector(greens: GreensFunctions) -> np.ndarray:
    return np.ascontiguousarray(np.diagonal(greens.spectral).real)


def dephasing_rate(greens: GreensFunctions, broadening: LeadBroadening,
                   se: SelfEnergySet) -> tuple[complex, float]:
    """Transport-weighted dephasing ratio and rate.

    Returns (R, rate) with

        R    = Tr[sigma_sc G^R Gamma_I G^A] / Tr[G^R Gamma_I G^A]
        rate = -2 * Im(R)          (hbar = 1)

    The real part of R carries the level-shift channel; -2*Re(R) is
    recoverable from the returned ratio.
    """
    lead_i = list(broadening.lead_i_sites)
    cols = greens.g_retarded[:, lead_i]
    rows = greens.g_advanced[lead_i, :]
    weights = broadening.gamma_i * np.einsum("il,li->i", cols, rows)
    denominator = weights.sum()
    if abs(denominator) < INJECTION_FLOOR:
        raise InjectionStarvedError(
            f"injected-carrier trace {abs(denominator):.3e} below {INJECTION_FLOOR:.0e}"
        )
    if abs(denominator.imag) > TRACE_IMAG_TOL * max(1.0, abs(denominator.real)):
        raise NumericalConsistencyError(
            f"injection trace has imaginary part {denominator.imag:.3e}"
        )
    numerator = (np.diagonal(se.sigma_ar) * weights).sum()
    ratio = complex(numerator / denominator)
    return ratio, -2.0 * ratio.imag
