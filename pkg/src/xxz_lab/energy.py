"""Exact norm and energy forms on the one-flip excitation space V.

A field f on the sites of a cylinder stands for psi^f = sum_x f(x) psi^x.  On
each oriented bond (x, y) the energy density is

    (1/2) sech(alpha) sech(a_x) sech(a_y) conj(D_f) D_g,
    D_h = cosh(a_y) h(y) - cosh(a_x) h(x),       a_x = alpha (l_x - mu).

The sech and cosh factors are folded into r = sqrt(cosh a_y / cosh a_x), so a
bond contributes (1/2) sech(alpha) conj(r f_y - f_x / r) (r g_y - g_x / r),
with r evaluated from log-cosh differences.  Bond sums use numpy's pairwise
summation in bond-list order, which makes them reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import InvalidParameter
from .states import log_cosh, sech


@dataclass(frozen=True, eq=False)
class PerturbationField:
    cylinder: object
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.cylinder.n_sites,):
            raise InvalidParameter(
                f"field has shape {vals.shape}, cylinder has {self.cylinder.n_sites} sites")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameter("field values must be finite")
        object.__setattr__(self, "values", vals)

    def __mul__(self, c):
        return PerturbationField(self.cylinder, self.values * c)

    __rmul__ = __mul__


def field(cyl, values):
    return PerturbationField(cyl, values)


def indicator(cyl, i):
    v = np.zeros(cyl.n_sites, dtype=complex)
    v[i] = 1.0
    return PerturbationField(cyl, v)


def zero_mode(cyl, spec, a):
    """f(x) = sech(alpha (l_x - mu)): the tangent to the ground-state family."""
    return PerturbationField(cyl, sech(a.alpha * (cyl.site_levels - spec.mu)))


def _same_lattice(f, g):
    cf, cg = f.cylinder, g.cylinder
    if cf is not cg and not (cf.sites.shape == cg.sites.shape and np.array_equal(cf.sites, cg.sites)):
        raise InvalidParameter("fields live on different lattices")
    return cf


def inner(f, g):
    """<psi^f | psi^g> = sum_x conj(f(x)) g(x)."""
    _same_lattice(f, g)
    return complex(np.sum(np.conj(f.values) * g.values))


def _bond_ratio(cyl, spec, a, bonds):
    lo = log_cosh(a.alpha * (cyl.site_levels[bonds[:, 0]] - spec.mu))
    hi = log_cosh(a.alpha * (cyl.site_levels[bonds[:, 1]] - spec.mu))
    return np.exp(0.5 * (hi - lo))


def _differences(vals, bonds, r):
    return r * vals[bonds[:, 1]] - vals[bonds[:, 0]] / r


def local_energy(bond, f, g, spec, a):
    """<psi^f | h_xy | psi^g> for one oriented bond (lower, upper[, direction])."""
    cyl = _same_lattice(f, g)
    b = np.asarray(bond, dtype=np.int64)[:2].reshape(1, 2)
    lv = cyl.site_levels
    if lv[b[0, 1]] != lv[b[0, 0]] + 1:
        raise InvalidParameter("bond must join a site to a site one level up")
    r = _bond_ratio(cyl, spec, a, b)
    df = _differences(f.values, b, r)
    dg = _differences(g.values, b, r)
    return complex(0.5 * a.sech_alpha * np.conj(df[0]) * dg[0])


def bond_energies(f, g, spec, a):
    """Vector of local energies over B(Lambda), in bond-list order."""
    cyl = _same_lattice(f, g)
    bonds = cyl.bonds
    r = _bond_ratio(cyl, spec, a, bonds)
    return 0.5 * a.sech_alpha * np.conj(_differences(f.values, bonds, r)) * _differences(g.values, bonds, r)


def total_energy(f, g, spec, a):
    """<psi^f | H | psi^g> summed over every oriented bond."""
    return complex(np.sum(bond_energies(f, g, spec, a)))


def rayleigh(f, spec, a):
    """<psi^f|H|psi^f> / <psi^f|psi^f>; real and non-negative."""
    nrm = inner(f, f).real
    if nrm == 0.0:
        raise InvalidParameter("Rayleigh quotient of the zero field is undefined")
    return max(total_energy(f, f, spec, a).real, 0.0) / nrm


def energy_matrix(cyl, spec, a):
    """Sparse |Lambda| x |Lambda| matrix M with f^* M g = <psi^f|H|psi^g>.

    M = (1/2) sech(alpha) B^T B, where B maps a field to its bond differences.
    """
    bonds = cyl.bonds
    r = _bond_ratio(cyl, spec, a, bonds)
    m = len(bonds)
    rows = np.concatenate([np.arange(m), np.arange(m)])
    cols = np.concatenate([bonds[:, 1], bonds[:, 0]])
    vals = np.concatenate([r, -1.0 / r])
    B = sp.csr_matrix((vals, (rows, cols)), shape=(m, cyl.n_sites))
    return (0.5 * a.sech_alpha * (B.T @ B)).tocsr()
