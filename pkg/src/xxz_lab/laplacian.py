"""Dirichlet eigenvalues of -Laplacian on the transverse domain Omega.

Finite differences on the grid lo + h*i anchored at the lower corner of the
domain's bounding box; grid points not strictly inside Omega carry the
boundary value 0 (no cut-cell correction).  Small problems are solved densely;
larger ones by Lanczos on the inverse operator, using a sparse LU factorization.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jn_zeros

from .domains import Disk, Interval, Polygon, Rectangle
from .exceptions import InvalidParameter
from .lanczos import lanczos

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class DirichletProblem:
    domain: object
    h: float

    @property
    def stencil(self):
        return {1: "3-point", 2: "5-point"}[self.domain.dim]


@dataclass(eq=False)
class DirichletOperator:
    problem: DirichletProblem
    matrix: sp.csr_matrix
    points: np.ndarray  # (N, dim) coordinates of the unknowns
    grid_index: np.ndarray = field(repr=False)  # grid multi-index of each unknown

    @property
    def size(self):
        return self.matrix.shape[0]

    def matvec(self, u):
        return self.matrix @ u


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    grid_spacing: float
    eigenvectors: np.ndarray = field(repr=False, default=None)


def assemble(problem):
    """Sparse symmetric positive definite stencil matrix of -Laplacian."""
    dom, h = problem.domain, float(problem.h)
    if dom.dim not in (1, 2):
        raise InvalidParameter(f"only 1-D and 2-D domains are supported, got dimension {dom.dim}")
    if not h > 0:
        raise InvalidParameter("grid spacing must be positive")
    lo, hi = dom.bounds()
    counts = np.floor((hi - lo) / h + 1e-9).astype(int) + 1
    axes = [lo[k] + h * np.arange(counts[k]) for k in range(dom.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    inside = dom.contains(pts, closed=False).reshape(mesh[0].shape)
    n = int(inside.sum())
    if n == 0:
        raise InvalidParameter(f"grid spacing h={h} leaves no interior points in {dom.describe()}")
    number = -np.ones(inside.shape, dtype=np.int64)
    number[inside] = np.arange(n)
    idx = np.argwhere(inside)
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    vals = [np.full(n, 2.0 * dom.dim / h ** 2)]
    for k in range(dom.dim):
        for step in (-1, 1):
            nb = idx.copy()
            nb[:, k] += step
            ok = (nb[:, k] >= 0) & (nb[:, k] < inside.shape[k])
            j = np.full(n, -1, dtype=np.int64)
            j[ok] = number[tuple(nb[ok].T)]
            keep = j >= 0
            rows.append(np.flatnonzero(keep))
            cols.append(j[keep])
            vals.append(np.full(keep.sum(), -1.0 / h ** 2))
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))
    return DirichletOperator(problem, A, pts[inside.ravel()], idx)


def smallest_eigenpairs(op, k=1, tol=1e-12, seed=0):
    """k lowest eigenpairs, ascending."""
    n = op.size
    if k > n:
        raise InvalidParameter(f"asked for {k} eigenpairs of a {n}-dimensional operator")
    A = op.matrix
    if n < DENSE_LIMIT:
        lam, vec = np.linalg.eigh(A.toarray())
        lam, vec = lam[:k], vec[:, :k]
    else:
        lu = spla.splu(A.tocsc())
        start = np.ones(n)  # deterministic, overlaps the positive ground mode
        res = lanczos(lu.solve, n, k=k, which="largest", tol=tol, start=start, seed=seed)
        lam, vec = 1.0 / res.eigenvalues, res.eigenvectors
        order = np.argsort(lam)
        lam, vec = lam[order], vec[:, order]
    resid = np.array([np.linalg.norm(A @ vec[:, i] - lam[i] * vec[:, i]) for i in range(k)])
    return SpectralResult(lam, resid, op.problem.h, vec)


def grid_aligned(domain, h):
    """True when the boundary of the domain lies on grid lines."""
    if isinstance(domain, (Interval, Rectangle)):
        lo, hi = domain.bounds()
        r = (hi - lo) / h
        return bool(np.all(np.abs(r - np.round(r)) < 1e-9))
    return False


def convergence_order(domain, h):
    """Expected order of the eigenvalue error: 2 on aligned boxes, 1 with a staircase boundary."""
    return 2 if grid_aligned(domain, h) and grid_aligned(domain, h / 2) else 1


@dataclass
class EigenReport:
    shape: str
    h: float
    k: int
    eigenvalue: float
    eigenvalue_half: float
    extrapolated: float
    analytic: float | None
    residual: float
    order: int

    def row(self):
        return {"shape": self.shape, "h": self.h, "k": self.k, "eigenvalue": self.eigenvalue,
                "extrapolated": self.extrapolated,
                "analytic": self.analytic if self.analytic is not None else float("nan"),
                "residual": self.residual}


def richardson(coarse, fine, order):
    return fine + (fine - coarse) / (2 ** order - 1)


def extrapolated_eigenvalues(domain, h, k=1):
    """Eigenvalues at h and h/2 combined by Richardson extrapolation."""
    order = convergence_order(domain, h)
    c = smallest_eigenpairs(assemble(DirichletProblem(domain, h)), k)
    f = smallest_eigenpairs(assemble(DirichletProblem(domain, h / 2)), k)
    ext = richardson(c.eigenvalues, f.eigenvalues, order)
    ref = analytic_reference(domain)
    reports = []
    for i in range(k):
        reports.append(EigenReport(domain.describe(), h, i + 1, float(c.eigenvalues[i]),
                                   float(f.eigenvalues[i]), float(ext[i]),
                                   ref if i == 0 else None,
                                   float(max(c.residual_norms[i], f.residual_norms[i])), order))
    return reports


def lambda1(domain, h=1 / 64):
    """First Dirichlet eigenvalue: the analytic value when known, else extrapolated."""
    ref = analytic_reference(domain)
    if ref is not None:
        return ref
    return extrapolated_eigenvalues(domain, h)[0].extrapolated


def bessel_j01():
    return float(jn_zeros(0, 1)[0])


def analytic_reference(shape):
    if isinstance(shape, Interval):
        return np.pi ** 2 / shape.length ** 2
    if isinstance(shape, Rectangle):
        return np.pi ** 2 * (1.0 / shape.a ** 2 + 1.0 / shape.b ** 2)
    if isinstance(shape, Disk):
        return bessel_j01() ** 2 / shape.rad ** 2
    if isinstance(shape, Polygon):
        return None
    return None
