"""Dense retarded/advanced Green's functions and the spectral function.

Every solve is a dense LU with partial pivoting on the full device matrix,
followed by an in-line residual check; a residual above tolerance raises
with a 1-norm condition estimate instead of returning a silently bad point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, StaleSelfEnergyError
from .lattice import HamiltonianMatrix
from .selfenergy import SelfEnergySet

RESIDUAL_TOL = 1e-10

BARE = "bare"
FULL = "full"


@dataclass(frozen=True)
class GreensFunctions:
    """Retarded/advanced pair and spectral function at one (energy, flux) point."""

    g_retarded: np.ndarray = field(repr=False)
    g_advanced: np.ndarray = field(repr=False)
    spectral: np.ndarray = field(repr=False)
    energy: float = 0.0
    flux: float = 0.0
    stage: str = BARE
    residual: float = 0.0

    def __post_init__(self):
        for m in (self.g_retarded, self.g_advanced, self.spectral):
            m.setflags(write=False)


def _solve(energy: float, effective: np.ndarray) -> tuple[np.ndarray, float]:
    n = effective.shape[0]
    matrix = energy * np.eye(n, dtype=complex) - effective
    try:
        g = np.linalg.solve(matrix, np.eye(n, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular system at E={energy}: {exc}") from exc
    residual = np.abs(matrix @ g - np.eye(n)).max()
    if residual > RESIDUAL_TOL:
        cond = np.linalg.cond(matrix, 1)
        raise SolverError(
            f"residual {residual:.3e} above {RESIDUAL_TOL:.0e} at E={energy} "
            f"(1-norm condition estimate {cond:.3e})"
        )
    return g, residual


def _package(g: np.ndarray, residual: float, energy: float, flux: float,
             stage: str) -> GreensFunctions:
    ga = g.conj().T
    return GreensFunctions(
        g_retarded=g,
        g_advanced=ga,
        spectral=(ga - g) / (2j * np.pi),
        energy=energy,
        flux=flux,
        stage=stage,
        residual=residual,
    )


def bare_green(energy: float, ham: HamiltonianMatrix,
               sigma_leads: np.ndarray) -> GreensFunctions:
    """Interferometer without the superconducting contact:
    [E - H - sigma_leads]^(-1)."""
    g, residual = _solve(energy, ham.entries + sigma_leads)
    return _package(g, residual, energy, ham.flux, BARE)


def full_green(energy: float, ham: HamiltonianMatrix,
               se: SelfEnergySet) -> GreensFunctions:
    """Full device: [E - H - sigma_leads - sigma_sc]^(-1).

    ``se`` must have been evaluated at exactly this (energy, flux); anything
    else is a staleness bug in the caller, not something to patch over.
    """
    if se.energy != energy or se.flux != ham.flux:
        raise StaleSelfEnergyError(
            f"self-energy evaluated at (E={se.energy}, flux={se.flux}) used at "
            f"(E={energy}, flux={ham.flux})"
        )
    g, residual = _solve(energy, ham.entries + se.total)
    return _package(g, residual, energy, ham.flux, FULL)


def spectral_function(greens: GreensFunctions) -> np.ndarray:
    """(g_advanced - g_retarded) / (2 pi i): Hermitian, positive semidefinite."""
    return (greens.g_advanced - greens.g_retarded) / (2j * np.pi)
