"""Independent oracles and property checks, exposed as the `selftest` command.

Everything here deliberately avoids the sweep plumbing: single-site devices
are assembled from raw matrices, gauge/flux checks rebuild their own
Hamiltonians, and the sum rule integrates the pipeline LDOS with adaptive
quadrature against an analytic normalization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import GeometryError
from .greens import bare_green, full_green
from .lattice import (
    Geometry,
    HamiltonianMatrix,
    TightBindingParams,
    assemble_total_hamiltonian,
    build_ring_hamiltonian,
    default_geometry,
)
from .observables import ldos, transmission
from .selfenergy import (
    AndreevCoupling,
    LeadBroadening,
    build_lead_broadening,
    lead_self_energy,
    self_energy_set,
)


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def line(self) -> str:
        return (f"{self.status:4s}  {self.name:32s} measured={self.measured:.3e} "
                f"tol={self.tolerance:.0e}  {self.detail}")


def analytic_single_site(gamma_i: float, gamma_ii: float, eps0: float, energy: float) -> float:
    """Breit-Wigner transmission of one level with two wide-band leads."""
    half_width = 0.5 * (gamma_i + gamma_ii)
    return gamma_i * gamma_ii / ((energy - eps0) ** 2 + half_width ** 2)


def single_site_broadening(gamma_i: float, gamma_ii: float) -> LeadBroadening:
    """Both leads on the only site; bypasses ring geometry on purpose."""
    return LeadBroadening(n_total=1, gamma_i=gamma_i, gamma_ii=gamma_ii,
                          lead_i_sites=(0,), lead_ii_sites=(0,))


def single_site_transmission(gamma_i: float, gamma_ii: float, eps0: float,
                             energy: float) -> float:
    """Same quantity through the full dense pipeline, for oracle comparison."""
    ham = HamiltonianMatrix(np.array([[eps0]], dtype=complex), flux=0.0)
    broadening = single_site_broadening(gamma_i, gamma_ii)
    greens = bare_green(energy, ham, lead_self_energy(broadening))
    return transmission(greens, broadening)


def _pipeline_transmission(params: TightBindingParams, geometry: Geometry,
                           energy: float, t_ar: float, gamma_i: float,
                           gamma_ii: float, gauge: str = "auto") -> float:
    ham = assemble_total_hamiltonian(params, geometry, gauge=gauge)
    broadening = build_lead_broadening(geometry, gamma_i, gamma_ii)
    sigma_leads = lead_self_energy(broadening)
    greens = bare_green(energy, ham, sigma_leads)
    if t_ar > 0:
        se = self_energy_set(broadening, AndreevCoupling(t_ar=t_ar), greens, geometry)
        greens = full_green(energy, ham, se)
    return transmission(greens, broadening)


def check_single_site_oracle(gamma_i: float = 0.2, gamma_ii: float = 0.2,
                             eps0: float = 0.0, n_energies: int = 50,
                             tolerance: float = 1e-12) -> CheckReport:
    energies = np.linspace(-2.0, 2.0, n_energies)
    worst = max(
        abs(single_site_transmission(gamma_i, gamma_ii, eps0, e)
            - analytic_single_site(gamma_i, gamma_ii, eps0, e))
        for e in energies
    )
    return CheckReport("single_site_vs_breit_wigner", worst <= tolerance, worst,
                       tolerance, f"{n_energies} energies")


def check_gauge_invariance(params: TightBindingParams, geometry: Geometry,
                           energy: float, flux: float, t_ar: float = 0.0,
                           gamma_i: float = 0.2, gamma_ii: float = 0.2,
                           tolerance: float = 1e-10) -> CheckReport:
    """Distributed per-bond phase vs the whole phase on one bond."""
    if geometry.mx != 0:
        raise GeometryError("gauge check is defined for ring-only geometry")
    p = params.with_flux(flux)
    t_dist = _pipeline_transmission(p, geometry, energy, t_ar, gamma_i, gamma_ii,
                                    gauge="distributed")
    t_conc = _pipeline_transmission(p, geometry, energy, t_ar, gamma_i, gamma_ii,
                                    gauge="concentrated")
    dev = abs(t_dist - t_conc)
    return CheckReport("gauge_invariance", dev <= tolerance, dev, tolerance,
                       f"flux={flux:.4f} t_ar={t_ar}")


def check_flux_symmetry(params: TightBindingParams, geometry: Geometry,
                        energy: float, flux: float, t_ar: float = 0.0,
                        gamma_i: float = 0.2, gamma_ii: float = 0.2,
                        tolerance: float = 1e-9) -> CheckReport:
    """T(E, flux) == T(E, -flux) and T(E, flux) == T(E, flux + 2 pi)."""
    t_plus = _pipeline_transmission(params.with_flux(flux), geometry, energy,
                                    t_ar, gamma_i, gamma_ii)
    t_minus = _pipeline_transmission(params.with_flux(-flux), geometry, energy,
                                     t_ar, gamma_i, gamma_ii)
    t_period = _pipeline_transmission(params.with_flux(flux + 2 * math.pi), geometry,
                                      energy, t_ar, gamma_i, gamma_ii)
    dev = max(abs(t_plus - t_minus), abs(t_plus - t_period))
    return CheckReport("flux_symmetry", dev <= tolerance, dev, tolerance,
                       f"flux={flux:.4f} t_ar={t_ar} mx={geometry.mx}")


def check_sum_rule(params: TightBindingParams, geometry: Geometry, site: int,
                   gamma_i: float = 0.2, gamma_ii: float = 0.2,
                   bound: float = 60.0, tolerance: float = 0.02) -> CheckReport:
    """Integrated LDOS per site must carry unit weight (contact off)."""
    ham = assemble_total_hamiltonian(params, geometry)
    broadening = build_lead_broadening(geometry, gamma_i, gamma_ii)
    sigma_leads = lead_self_energy(broadening)

    def integrand(energy):
        return ldos(bare_green(energy, ham, sigma_leads), site)

    breakpoints = np.linalg.eigvalsh(ham.entries)
    with warnings.catch_warnings():
        # the Lorentzian comb makes quad grumble; the tolerance check below
        # is the actual convergence gate
        warnings.simplefilter("ignore", IntegrationWarning)
        total, _ = quad(integrand, -bound, bound, points=breakpoints,
                        limit=50 + 4 * len(breakpoints))
    dev = abs(total - 1.0)
    return CheckReport("sum_rule", dev <= tolerance, dev, tolerance,
                       f"site={site} integral={total:.5f}")


def check_sum_rule_single_site(gamma_i: float = 0.2, gamma_ii: float = 0.2,
                               bound: float = 60.0, tolerance: float = 0.02) -> CheckReport:
    ham = HamiltonianMatrix(np.array([[0.0j]]), flux=0.0)
    broadening = single_site_broadening(gamma_i, gamma_ii)
    sigma = lead_self_energy(broadening)
    total, _ = quad(lambda e: ldos(bare_green(e, ham, sigma), 0), -bound, bound,
                    points=[0.0], limit=200)
    dev = abs(total - 1.0)
    return CheckReport("sum_rule_single_site", dev <= tolerance, dev, tolerance,
                       f"integral={total:.5f}")


def run_selftest() -> list[CheckReport]:
    """All checks at preset parameters; reports in declaration order."""
    params = TightBindingParams()
    ring = default_geometry()
    spacer = default_geometry(mx=3, my=10)
    reports = [
        check_single_site_oracle(),
        check_gauge_invariance(params, ring, energy=0.0, flux=0.0),
        check_gauge_invariance(params, ring, energy=0.0, flux=math.pi),
        check_gauge_invariance(params, ring, energy=0.0, flux=math.pi, t_ar=0.2),
        check_flux_symmetry(params, ring, energy=0.0, flux=math.pi / 3, t_ar=0.2),
        check_flux_symmetry(params, spacer, energy=0.0, flux=math.pi / 3, t_ar=0.2),
        check_sum_rule_single_site(gamma_i=0.2, gamma_ii=0.2),
        check_sum_rule(params, ring, site=0),
        check_sum_rule(params, ring, site=55),
    ]
    return reports
