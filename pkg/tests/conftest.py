import math

import numpy as np
import pytest

from snring.greens import bare_green, full_green
from snring.lattice import (
    TightBindingParams,
    assemble_total_hamiltonian,
    default_geometry,
)
from snring.selfenergy import (
    AndreevCoupling,
    build_lead_broadening,
    lead_self_energy,
    self_energy_set,
)

GAMMA = 0.2


@pytest.fixture(scope="session")
def preset_geometry():
    return default_geometry()


@pytest.fixture(scope="session")
def preset_params():
    return TightBindingParams()


@pytest.fixture(scope="session")
def preset_broadening(preset_geometry):
    return build_lead_broadening(preset_geometry, GAMMA, GAMMA)


def pipeline(energy, flux, t_ar, geometry=None, gamma=GAMMA):
    """Bare and full stages at one point; full is bare when t_ar == 0."""
    geometry = geometry if geometry is not None else default_geometry()
    broadening = build_lead_broadening(geometry, gamma, gamma)
    params = TightBindingParams(flux=flux)
    ham = assemble_total_hamiltonian(params, geometry)
    bare = bare_green(energy, ham, lead_self_energy(broadening))
    if t_ar == 0:
        return bare, None, bare, broadening
    se = self_energy_set(broadening, AndreevCoupling(t_ar=t_ar), bare, geometry)
    return bare, se, full_green(energy, ham, se), broadening


@pytest.fixture(scope="session")
def preset_point():
    """Weak-coupling preset point (E=0, flux=pi, t_ar=0.2)."""
    return pipeline(0.0, math.pi, 0.2)


def reference_transmission(energy, flux, t_ar, n=100, gamma=GAMMA,
                           lead_i=None, lead_ii=None, sc=None):
    """Independent oracle: explicit inv() route, no shared pipeline code."""
    lead_i = list(range(51, 71)) if lead_i is None else lead_i
    lead_ii = list(range(0, 20)) if lead_ii is None else lead_ii
    sc = list(range(20, 30)) if sc is None else sc
    h = np.zeros((n, n), complex)
    for k in range(n):
        h[k, (k + 1) % n] = -np.exp(1j * flux / n)
        h[(k + 1) % n, k] = -np.exp(-1j * flux / n)
    g1 = np.zeros(n)
    g1[lead_i] = gamma
    g2 = np.zeros(n)
    g2[lead_ii] = gamma
    a = energy * np.eye(n) - h + 0.5j * np.diag(g1 + g2)
    gb = np.linalg.inv(a)
    m = a.copy()
    for i in sc:
        m[i, i] -= t_ar ** 2 * gb[i, i]
    gf = np.linalg.inv(m)
    total = 0.0
    for p in lead_i:
        for q in lead_ii:
            total += g1[p] * g2[q] * abs(gf[p, q]) ** 2
    return total
