"""Device geometry and tight-binding Hamiltonian assembly.

The device is an N-site ring threaded by a flux phase, optionally coupled
through one column of a finite 2D normal-metal spacer whose far column
carries the superconducting contact.  Site numbering: ring sites 0..N-1,
spacer site (column n, row m) at N + n*my + m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GeometryError, ParameterError

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Geometry:
    """Static layout of the device.

    ``sc_sites`` are the device sites that receive the Andreev self-energy:
    an arc of the ring when there is no spacer, the far spacer column
    otherwise.  ``ring_contact_sites`` are the ring sites bonded to spacer
    column 0 (one per spacer row).
    """

    n_ring: int
    lead_i_sites: tuple[int, ...]
    lead_ii_sites: tuple[int, ...]
    sc_sites: tuple[int, ...]
    mx: int = 0
    my: int = 0
    ring_contact_sites: tuple[int, ...] = ()

    def __post_init__(self):
        n = self.n_ring
        if n < 3:
            raise GeometryError(f"ring needs at least 3 sites, got {n}")
        if self.mx < 0 or self.my < 0:
            raise GeometryError("spacer dimensions must be non-negative")
        spacer_lo, spacer_hi = n, n + self.mx * self.my
        for name in ("lead_i_sites", "lead_ii_sites"):
            sites = getattr(self, name)
            if any(s < 0 or s >= n for s in sites):
                raise GeometryError(f"{name} outside ring range [0, {n})")
        if any(s < 0 or s >= spacer_hi for s in self.sc_sites):
            raise GeometryError(f"sc_sites outside device range [0, {spacer_hi})")
        lead_i, lead_ii = set(self.lead_i_sites), set(self.lead_ii_sites)
        sc = set(self.sc_sites)
        if lead_i & lead_ii:
            raise GeometryError("lead site sets overlap")
        if self.mx == 0:
            if sc & (lead_i | lead_ii):
                raise GeometryError("superconductor arc overlaps a lead")
            if any(s >= n for s in sc):
                raise GeometryError("sc_sites must be ring sites when mx = 0")
        else:
            if self.my < 1:
                raise GeometryError("spacer needs at least one row when mx > 0")
            if len(self.ring_contact_sites) != self.my:
                raise GeometryError(
                    f"need {self.my} ring contact sites, got {len(self.ring_contact_sites)}"
                )
            if any(s < 0 or s >= n for s in self.ring_contact_sites):
                raise GeometryError("ring_contact_sites outside ring range")
            if any(s < spacer_lo or s >= spacer_hi for s in sc):
                raise GeometryError("sc_sites must be spacer sites when mx > 0")
        for name in ("lead_i_sites", "lead_ii_sites", "sc_sites", "ring_contact_sites"):
            sites = getattr(self, name)
            if len(set(sites)) != len(sites):
                raise GeometryError(f"duplicate indices in {name}")

    @property
    def n_spacer(self) -> int:
        return self.mx * self.my

    @property
    def n_total(self) -> int:
        return self.n_ring + self.mx * self.my


@dataclass(frozen=True)
class TightBindingParams:
    """On-site energies, hoppings, and the flux phase (radians per full loop)."""

    eps_ring: float = 0.0
    t_ring: float = -1.0
    eps_spacer: float = 0.0
    t_x: float = -1.0
    t_y: float = -1.0
    t_x_prime: float = -1.0
    flux: float = np.pi

    def __post_init__(self):
        for name in ("eps_ring", "t_ring", "eps_spacer", "t_x", "t_y", "t_x_prime", "flux"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    def with_flux(self, flux: float) -> "TightBindingParams":
        return TightBindingParams(self.eps_ring, self.t_ring, self.eps_spacer,
                                  self.t_x, self.t_y, self.t_x_prime, flux)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense complex Hermitian matrix for the device at a fixed flux."""

    entries: np.ndarray = field(repr=False)
    flux: float = 0.0

    def __post_init__(self):
        h = self.entries
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise GeometryError("Hamiltonian must be square")
        defect = np.abs(h - h.conj().T).max() if h.size else 0.0
        if defect > HERMITICITY_TOL:
            raise GeometryError(f"Hamiltonian not Hermitian: max defect {defect:.3e}")
        h.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def default_geometry(n_ring: int = 100, mx: int = 0, my: int = 10,
                     lead_rank: int = 20) -> Geometry:
    """Standard layout: drain arc starting at site 0, source arc starting one
    site past the opposite point, superconductor contact on the arc between
    them (or on the far spacer column when a spacer is present), so only one
    interferometer arm passes the SN contact.

    The one-site offset of the source arc puts the two arcs on opposite
    sublattice parity; with the even-parity alignment the blocked-arm stub
    backscatters at the band center and the open-channel transmission at
    strong contact coupling falls measurably short of unity.
    """
    lead_ii = tuple(range(lead_rank))
    start = n_ring // 2 + 1
    lead_i = tuple(range(start, start + lead_rank))
    if mx == 0:
        sc = tuple(range(lead_rank, lead_rank + my))
        contacts: tuple[int, ...] = ()
    else:
        first = n_ring + (mx - 1) * my
        sc = tuple(range(first, first + my))
        contacts = tuple(range(lead_rank, lead_rank + my))
    return Geometry(n_ring=n_ring, lead_i_sites=lead_i, lead_ii_sites=lead_ii,
                    sc_sites=sc, mx=mx, my=my, ring_contact_sites=contacts)


def site_index(n: int, m: int, geometry: Geometry) -> int:
    """Device index of spacer site at column ``n``, row ``m``."""
    if not (0 <= n < geometry.mx and 0 <= m < geometry.my):
        raise IndexError(
            f"spacer coordinates ({n}, {m}) outside {geometry.mx} x {geometry.my} grid"
        )
    return geometry.n_ring + n * geometry.my + m


def build_ring_hamiltonian(params: TightBindingParams, geometry: Geometry,
                           gauge: str = "distributed",
                           phase_bond: Optional[int] = None) -> HamiltonianMatrix:
    """N x N ring block.

    With ``gauge="distributed"`` every bond (n, n+1 mod N) carries
    t_ring * exp(i flux / N); with ``gauge="concentrated"`` the full phase
    exp(i flux) sits on the single bond (``phase_bond``, ``phase_bond``+1),
    default the wrap bond (N-1, 0).  The two are related by a diagonal
    unitary and share their spectrum and transport.
    """
    n = geometry.n_ring
    if n < 3:
        raise GeometryError(f"ring needs at least 3 sites, got {n}")
    h = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(h, params.eps_ring)
    idx = np.arange(n)
    nxt = (idx + 1) % n
    if gauge == "distributed":
        hop = np.full(n, params.t_ring * np.exp(1j * params.flux / n))
    elif gauge == "concentrated":
        bond = (n - 1) if phase_bond is None else phase_bond % n
        hop = np.full(n, complex(params.t_ring))
        hop[bond] = params.t_ring * np.exp(1j * params.flux)
    else:
        raise ParameterError(f"unknown gauge {gauge!r}")
    h[idx, nxt] = hop
    h[nxt, idx] = hop.conj()
    return HamiltonianMatrix(h, flux=params.flux)


def build_spacer_hamiltonian(params: TightBindingParams, geometry: Geometry) -> HamiltonianMatrix:
    """mx*my x mx*my spacer block with open boundaries.

    Columns are bonded by t_x, rows by t_y; indices are local to the block
    (device index minus n_ring).
    """
    mx, my = geometry.mx, geometry.my
    if mx < 1 or my < 1:
        raise GeometryError(f"spacer needs mx >= 1 and my >= 1, got {mx} x {my}")
    size = mx * my
    h = np.zeros((size, size), dtype=complex)
    np.fill_diagonal(h, params.eps_spacer)
    if mx > 1:
        left = (np.arange(mx - 1)[:, None] * my + np.arange(my)[None, :]).ravel()
        h[left, left + my] = params.t_x
        h[left + my, left] = params.t_x
    if my > 1:
        below = (np.arange(mx)[:, None] * my + np.arange(my - 1)[None, :]).ravel()
        h[below, below + 1] = params.t_y
        h[below + 1, below] = params.t_y
    return HamiltonianMatrix(h, flux=params.flux)


def _contact_free_bond(geometry: Geometry) -> int:
    """Ring bond in the middle of the arc free of spacer contacts.

    Any ring bond lying between two contact sites sits on a closed
    ring-spacer plaquette; a flux phase there would thread that plaquette
    instead of the ring hole alone.  Assumes the contact arc does not wrap
    the index seam (true for the default layout).
    """
    lo, hi = min(geometry.ring_contact_sites), max(geometry.ring_contact_sites)
    return (hi + (geometry.n_ring - (hi - lo)) // 2) % geometry.n_ring


def assemble_total_hamiltonian(params: TightBindingParams, geometry: Geometry,
                               gauge: str = "auto") -> HamiltonianMatrix:
    """Full device matrix: ring block, spacer block, and the t_x' bonds from
    each ring contact site to spacer column 0.  Equals the ring block when
    there is no spacer.

    The flux is a pure ring-hole phase.  With a spacer attached, the
    per-bond Peierls distribution would leak phase into every ring-spacer
    plaquette (each contact pair closes a loop through the spacer), spoiling
    2 pi periodicity, so ``gauge="auto"`` concentrates the full phase on one
    bond outside the contact arc; the bare ring keeps the per-bond form.
    """
    if gauge == "auto":
        gauge = "distributed" if geometry.mx == 0 else "concentrated"
    if geometry.mx == 0:
        return build_ring_hamiltonian(params, geometry, gauge=gauge)
    ring = build_ring_hamiltonian(params, geometry, gauge=gauge,
                                  phase_bond=_contact_free_bond(geometry))
    spacer = build_spacer_hamiltonian(params, geometry)
    n, total = geometry.n_ring, geometry.n_total
    h = np.zeros((total, total), dtype=complex)
    h[:n, :n] = ring.entries
    h[n:, n:] = spacer.entries
    contacts = np.asarray(geometry.ring_contact_sites)
    col0 = n + np.arange(geometry.my)
    h[contacts, col0] = params.t_x_prime
    h[col0, contacts] = params.t_x_prime
    return HamiltonianMatrix(h, flux=params.flux)
