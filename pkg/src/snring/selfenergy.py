"""Lead and Andreev self-energies.

The leads enter in the wide-band limit as an energy-independent, purely
imaginary diagonal.  The superconducting contact enters as a diagonal
self-energy proportional to the on-site elements of the Green's function of
the interferometer *without* that contact (leads included), evaluated at the
same energy and flux:

    sigma_sc[i, i] = (t_ar * |delta| / g)**2 * g_bare[i, i]   for i in sc_sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CausalityError, ParameterError
from .lattice import Geometry

IMAG_PART_TOL = 1e-12


@dataclass(frozen=True)
class LeadBroadening:
    """Diagonal broadening matrices for the source (I) and drain (II) leads."""

    n_total: int
    gamma_i: float
    gamma_ii: float
    lead_i_sites: tuple[int, ...]
    lead_ii_sites: tuple[int, ...]
    gamma_i_diag: np.ndarray = field(init=False, repr=False)
    gamma_ii_diag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.gamma_i <= 0 or self.gamma_ii <= 0:
            raise ParameterError("lead couplings must be positive")
        for diag_name, gamma, sites in (
            ("gamma_i_diag", self.gamma_i, self.lead_i_sites),
            ("gamma_ii_diag", self.gamma_ii, self.lead_ii_sites),
        ):
            diag = np.zeros(self.n_total)
            diag[list(sites)] = gamma
            diag.setflags(write=False)
            object.__setattr__(self, diag_name, diag)

    @property
    def gamma_i_matrix(self) -> np.ndarray:
        return np.diag(self.gamma_i_diag)

    @property
    def gamma_ii_matrix(self) -> np.ndarray:
        return np.diag(self.gamma_ii_diag)


def build_lead_broadening(geometry: Geometry, gamma_i: float, gamma_ii: float) -> LeadBroadening:
    return LeadBroadening(
        n_total=geometry.n_total,
        gamma_i=gamma_i,
        gamma_ii=gamma_ii,
        lead_i_sites=tuple(geometry.lead_i_sites),
        lead_ii_sites=tuple(geometry.lead_ii_sites),
    )


def lead_self_energy(broadening: LeadBroadening) -> np.ndarray:
    """Wide-band lead self-energy -i/2 (gamma_I + gamma_II), dense diagonal."""
    sigma = np.diag(-0.5j * (broadening.gamma_i_diag + broadening.gamma_ii_diag))
    sigma.setflags(write=False)
    return sigma


@dataclass(frozen=True)
class AndreevCoupling:
    """SN tunnel coupling, gap magnitude, and the pair coupling constant."""

    t_ar: float = 0.2
    delta_abs: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        if self.t_ar < 0:
            raise ParameterError("t_ar must be non-negative")
        if self.delta_abs <= 0 or self.g <= 0:
            raise ParameterError("delta_abs and g must be positive")
        if not np.isfinite(self.coefficient):
            raise ParameterError("Andreev coefficient is not finite")

    @property
    def coefficient(self) -> float:
        """(t_ar * |delta| / g)**2, the prefactor of the contact self-energy."""
        return (self.t_ar * self.delta_abs / self.g) ** 2


def andreev_self_energy(coupling: AndreevCoupling, bare_diag: np.ndarray,
                        geometry: Geometry) -> np.ndarray:
    """Dense diagonal contact self-energy from the bare on-site Green's values.

    ``bare_diag`` holds g_bare[i, i] for each i in ``geometry.sc_sites``, in
    that order.  Entries must be retarded (imaginary part <= 0 up to solver
    noise); the result inherits that sign, which keeps the full solve causal.
    """
    bare_diag = np.asarray(bare_diag, dtype=complex)
    sites = geometry.sc_sites
    if bare_diag.shape != (len(sites),):
        raise ParameterError(
            f"need one bare diagonal value per contact site: expected {len(sites)}, "
            f"got {bare_diag.shape}"
        )
    worst = bare_diag.imag.max() if len(sites) else 0.0
    if worst > IMAG_PART_TOL:
        raise CausalityError(
            f"bare Green's diagonal has positive imaginary part {worst:.3e}"
        )
    sigma = np.zeros((geometry.n_total, geometry.n_total), dtype=complex)
    sigma[list(sites), list(sites)] = coupling.coefficient * bare_diag
    sigma.setflags(write=False)
    return sigma


@dataclass(frozen=True)
class SelfEnergySet:
    """Lead plus contact self-energies evaluated at one (energy, flux) point."""

    sigma_leads: np.ndarray = field(repr=False)
    sigma_ar: np.ndarray = field(repr=False)
    energy: float = 0.0
    flux: float = 0.0

    def __post_init__(self):
        diag = np.diagonal(self.sigma_ar)
        if diag.size and diag.imag.max() > IMAG_PART_TOL:
            raise CausalityError("contact self-energy has positive imaginary part")

    @property
    def total(self) -> np.ndarray:
        return self.sigma_leads + self.sigma_ar


def self_energy_set(broadening: LeadBroadening, coupling: AndreevCoupling,
                    bare, geometry: Geometry) -> SelfEnergySet:
    """Assemble the tagged self-energy set from a bare-stage Green's result."""
    sc = list(geometry.sc_sites)
    bare_diag = bare.g_retarded[sc, sc]
    sigma_ar = andreev_self_energy(coupling, bare_diag, geometry)
    return SelfEnergySet(
        sigma_leads=lead_self_energy(broadening),
        sigma_ar=sigma_ar,
        energy=bare.energy,
        flux=bare.flux,
    )
