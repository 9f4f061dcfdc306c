"""Exact diagonalization of H_Lambda on (C^2)^{|Lambda|}.

Basis states are bitmasks over site indices; bit i set means site i is down.
The full-space index of a basis state is its bitmask, so a product state
assembled site by site puts site i on bit i.

Each bond term is the projector |xi><xi| written in spin operators,

    h_xy = -(S1_x S1_y + S2_x S2_y)/Delta - S3_x S3_y + 1/4 + A(Delta) (S3_x - S3_y),

with x the lower site.  On (up-down, down-up) of the bond it is the 2x2 block
[[1/2 + A, -1/(2 Delta)], [-1/(2 Delta), 1/2 - A]] and it annihilates
up-up and down-down, so the number of down spins is conserved.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse as sp

from .exceptions import ConvergenceError, InvalidParameter
from .lanczos import lanczos
from .states import interface, v_amplitudes, w_amplitudes

DENSE_LIMIT = 2000
DEFAULT_MAX_SITES = 16

S1 = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
S2 = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
S3 = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def bond_hamiltonian(a, field_coeff=None):
    """4x4 matrix of h_xy assembled from the spin matrices (lower site first).

    ``field_coeff`` multiplies (S3_x - S3_y); it defaults to A(Delta).
    """
    c = a.a_field if field_coeff is None else field_coeff
    kron = np.kron
    return (-(kron(S1, S1) + kron(S2, S2)) / a.delta - kron(S3, S3) + 0.25 * np.eye(4)
            + c * (kron(S3, ID2) - kron(ID2, S3)))


def _bond_constants(a):
    return 0.5 + a.a_field, 0.5 - a.a_field, -0.5 / a.delta


def _check_size(cyl, max_sites):
    if cyl.n_sites > max_sites:
        raise InvalidParameter(
            f"|Lambda| = {cyl.n_sites} exceeds the exact-diagonalization cap of {max_sites}")


def apply_hamiltonian(psi, cyl, a, basis=None):
    """H psi, matrix-free.

    ``psi`` lives on the full space (length 2^|Lambda|) unless ``basis`` (a
    sorted array of bitmasks, e.g. one magnetization sector) is given.
    """
    psi = np.asarray(psi)
    n = cyl.n_sites
    states = np.arange(1 << n, dtype=np.int64) if basis is None else np.asarray(basis, dtype=np.int64)
    if psi.shape != states.shape:
        raise InvalidParameter(f"state has length {psi.shape}, expected {states.shape}")
    up_down, down_up, hop = _bond_constants(a)
    out = np.zeros_like(psi, dtype=np.result_type(psi, float))
    for i, j, _ in cyl.bonds:
        bi = (states >> i) & 1
        bj = (states >> j) & 1
        mixed = bi != bj
        diag = np.where(bi == 0, up_down, down_up) * mixed
        flipped = states ^ ((1 << int(i)) | (1 << int(j)))
        if basis is None:
            partner = psi[flipped]
        else:
            pos = np.searchsorted(states, flipped)
            pos[~mixed] = 0
            partner = np.where(mixed, psi[pos], 0)
        out += diag * psi + hop * mixed * partner
    return out


def hamiltonian_matrix(cyl, a, basis=None):
    """Sparse H on the full space or on the span of ``basis``."""
    n = cyl.n_sites
    states = np.arange(1 << n, dtype=np.int64) if basis is None else np.asarray(basis, dtype=np.int64)
    dim = len(states)
    up_down, down_up, hop = _bond_constants(a)
    diag = np.zeros(dim)
    rows, cols = [], []
    for i, j, _ in cyl.bonds:
        bi = (states >> i) & 1
        bj = (states >> j) & 1
        mixed = bi != bj
        diag += np.where(bi == 0, up_down, down_up) * mixed
        src = np.flatnonzero(mixed)
        flipped = states[src] ^ ((1 << int(i)) | (1 << int(j)))
        dst = flipped if basis is None else np.searchsorted(states, flipped)
        rows.append(src)
        cols.append(dst)
    r = np.concatenate(rows + [np.arange(dim)])
    c = np.concatenate(cols + [np.arange(dim)])
    nnz_hop = sum(len(x) for x in rows)
    v = np.concatenate([np.full(nnz_hop, hop), diag])
    return sp.csr_matrix((v, (r, c)), shape=(dim, dim))


def sector_basis(n_sites, n_down):
    """Sorted bitmasks with exactly ``n_down`` bits set."""
    masks = [sum(1 << k for k in c) for c in combinations(range(n_sites), n_down)]
    return np.array(sorted(masks), dtype=np.int64)


@dataclass(eq=False)
class SectorHamiltonian:
    n: int
    basis: np.ndarray
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dimension(self):
        return len(self.basis)

    def apply(self, v):
        return self.matrix @ v


def sector_hamiltonian(cyl, a, n_down):
    basis = sector_basis(cyl.n_sites, n_down)
    return SectorHamiltonian(n_down, basis, hamiltonian_matrix(cyl, a, basis))


def _product_state(columns):
    """Tensor product of per-site (up, down) pairs; site i on bit i."""
    psi = np.ones(1, dtype=complex)
    for up, down in columns:
        psi = np.concatenate([psi * up, psi * down])
    return psi


def assemble_ground_state(spec, cyl, a, max_sites=DEFAULT_MAX_SITES):
    """psi_0(z) = tensor product of v_x(z) over the sites."""
    _check_size(cyl, max_sites)
    up, down = v_amplitudes(cyl.site_levels, spec, a)
    return _product_state(zip(up, down))


def assemble_excitation(f, spec, cyl, a, max_sites=DEFAULT_MAX_SITES):
    """psi^f = sum_x f(x) psi^x, with psi^x = w_x at x and v_y elsewhere."""
    _check_size(cyl, max_sites)
    values = np.asarray(getattr(f, "values", f), dtype=complex)
    if values.shape != (cyl.n_sites,):
        raise InvalidParameter(f"field has shape {values.shape}, expected ({cyl.n_sites},)")
    vu, vd = v_amplitudes(cyl.site_levels, spec, a)
    wu, wd = w_amplitudes(cyl.site_levels, spec, a)
    # run the product with a one-step memory: `ground` carries only v's,
    # `excited` carries exactly one weighted w
    ground = np.ones(1, dtype=complex)
    excited = np.zeros(1, dtype=complex)
    for x in range(cyl.n_sites):
        excited = np.concatenate([excited * vu[x] + ground * wu[x] * values[x],
                                  excited * vd[x] + ground * wd[x] * values[x]])
        ground = np.concatenate([ground * vu[x], ground * vd[x]])
    return excited


@dataclass
class SectorReport:
    n: int
    dim: int
    kernel_dim: int
    gamma1: float
    residual: float
    method: str


@dataclass
class GroundSpaceReport:
    kernel_dimension: int
    sectors: list
    gamma1: float
    max_ground_residual: float
    seed: int

    @property
    def sector_kernel(self):
        return {s.n: s.kernel_dim for s in self.sectors}

    def rows(self, n_sites, delta):
        return [{"sites": n_sites, "delta": delta, "sector": s.n, "dim": s.dim,
                 "kernel_dim": s.kernel_dim, "gamma1": s.gamma1, "residual": s.residual,
                 "seed": self.seed} for s in self.sectors]


def sector_spectrum(sector, k=6, seed=0):
    """Lowest eigenvalues of one sector: dense below DENSE_LIMIT, Lanczos above."""
    dim = sector.dimension
    if dim < DENSE_LIMIT:
        vals = np.linalg.eigvalsh(sector.matrix.toarray())
        return vals[: min(k, dim)], 0.0, "dense"
    res = lanczos(sector.apply, dim, k=min(k, dim), tol=1e-10, max_steps=min(dim, 600),
                  seed=seed)
    return res.eigenvalues, float(np.max(res.residuals)), "lanczos"


def kernel_dimension(cyl, a, tol=1e-10, max_sites=DEFAULT_MAX_SITES, seed=0,
                     test_z=(0.0, 0.7 - 0.3j, -1.5 + 2.0j), spec_factory=None):
    """Count zero modes sector by sector and locate the gap gamma_1.

    Also reports max ||H psi_0(z)|| over ``test_z``.
    """
    _check_size(cyl, max_sites)
    seeds = np.random.SeedSequence(seed).spawn(cyl.n_sites + 1)
    sectors = []
    for n_down in range(cyl.n_sites + 1):
        sec = sector_hamiltonian(cyl, a, n_down)
        rng_seed = int(seeds[n_down].generate_state(1)[0])
        try:
            vals, resid, method = sector_spectrum(sec, seed=rng_seed)
        except ConvergenceError as exc:
            raise ConvergenceError(f"sector n={n_down}: {exc}", exc.residuals) from exc
        if vals[0] < -tol:
            raise ConvergenceError(f"sector n={n_down} has negative eigenvalue {vals[0]:.3e}")
        kdim = int(np.sum(vals < tol))
        above = vals[vals >= tol]
        sectors.append(SectorReport(n_down, sec.dimension, kdim,
                                    float(above[0]) if len(above) else float("inf"),
                                    resid, method))
    make = spec_factory or interface
    worst = 0.0
    for z in test_z:
        psi = assemble_ground_state(make(z), cyl, a, max_sites)
        worst = max(worst, float(np.linalg.norm(apply_hamiltonian(psi, cyl, a))))
    return GroundSpaceReport(sum(s.kernel_dim for s in sectors), sectors,
                             min(s.gamma1 for s in sectors), worst, seed)


def spectral_gap(cyl, a, tol=1e-10, max_sites=DEFAULT_MAX_SITES, seed=0):
    return kernel_dimension(cyl, a, tol, max_sites, seed).gamma1


def sector_dimension(n_sites, n_down):
    return comb(n_sites, n_down)
