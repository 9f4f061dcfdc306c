"""Product ansatz f(x) = F(l_x) Phi(x_perp / R) and its closed-form energy.

With the profile F(l) = sech(alpha (l - mu)) / 2 the exact Rayleigh quotient of
the ansatz tends, as R grows, to

    (sech(alpha) / 2 R^2) * (||grad Phi||^2 / ||Phi||^2) * g(Delta, mu),

where g is the ratio of the adjacent-level and same-level sech sums.  The
gap bound lambda_1 g / (2 Delta R^2) is that value for the first Dirichlet
mode of Omega.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .energy import PerturbationField, rayleigh
from .exceptions import InvalidParameter
from .states import interface, log_cosh, make_aniso, sech

G_REL_TOL = 1e-12  # slack for floating-point ties in the g lower bound


# ---------------------------------------------------------------- profile

@dataclass(frozen=True, eq=False)
class ProfileF:
    levels: np.ndarray  # integer levels, ascending and contiguous
    values: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if lv.shape != vals.shape or lv.ndim != 1 or len(lv) == 0:
            raise InvalidParameter("profile needs one value per level")
        if np.any(np.diff(lv) != 1):
            raise InvalidParameter("profile levels must be contiguous and ascending")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameter("profile values must be finite")
        if not np.any(vals):
            raise InvalidParameter("profile is identically zero")
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "values", vals)

    def at(self, l):
        """F at integer level(s) l."""
        idx = np.asarray(l, dtype=np.int64) - self.levels[0]
        if np.any(idx < 0) or np.any(idx >= len(self.values)):
            raise InvalidParameter("level outside the profile's range")
        return self.values[idx]


def _check_L(L):
    if int(L) != L or L < 0 or L % 2:
        raise InvalidParameter(f"L must be a non-negative even integer, got {L}")
    return int(L)


def symmetric_levels(L):
    half = _check_L(L) // 2
    return np.arange(-half, half + 1)


def optimal_profile(L, spec, a, levels=None):
    """F(l) = sech(alpha (l - mu)) / 2 on levels -L/2..L/2 (or the given ones)."""
    lv = symmetric_levels(L) if levels is None else np.asarray(levels)
    return ProfileF(lv, 0.5 * sech(a.alpha * (lv - spec.mu)))


def constant_profile(L, levels=None):
    lv = symmetric_levels(L) if levels is None else np.asarray(levels)
    return ProfileF(lv, np.ones(len(lv)))


# ---------------------------------------------------------------- g(Delta, mu)

@dataclass(frozen=True)
class GValue:
    g: float
    numerator_sum: float
    denominator_sum: float
    log_numerator: float
    log_denominator: float


def g_function(L, spec, a):
    """g = sum_l sech(a_l) sech(a_{l+1}) / sum_l sech(a_l)^2, a_l = alpha (l - mu).

    Evaluated with log-sum-exp, so far-displaced interfaces stay accurate.
    """
    L = _check_L(L)
    if L < 2:
        raise InvalidParameter(f"g needs L >= 2, got {L}")
    lv = symmetric_levels(L)
    ls = -log_cosh(a.alpha * (lv - spec.mu))  # log sech
    log_num = float(logsumexp(ls[:-1] + ls[1:]))
    log_den = float(logsumexp(2.0 * ls))
    return GValue(float(np.exp(log_num - log_den)), float(np.exp(log_num)),
                  float(np.exp(log_den)), log_num, log_den)


def g_lower_bound(a):
    """e^{-alpha} = Delta - sqrt(Delta^2 - 1)."""
    return 1.0 if a.delta == 1.0 else a.exp_minus_alpha


@dataclass(frozen=True)
class GBoundReport:
    delta: float
    mu: float
    L: int
    g: float
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self):
        return self.lower_ok and self.upper_ok


def check_g_bounds(gv, a, L, mu=0.0, rel_tol=G_REL_TOL):
    """Does e^{-alpha} <= g <= 1 hold?  Violations are reported, never raised."""
    lower = g_lower_bound(a)
    return GBoundReport(a.delta, float(mu), int(L), gv.g, lower, 1.0,
                        gv.g >= lower * (1.0 - rel_tol), gv.g <= 1.0 + rel_tol)


def smallest_valid_L(a, spec, L_max=400, rel_tol=G_REL_TOL):
    """Smallest even L >= 2 with g >= e^{-alpha}, or None if none up to L_max."""
    for L in range(2, L_max + 1, 2):
        if check_g_bounds(g_function(L, spec, a), a, L, spec.mu, rel_tol).lower_ok:
            return L
    return None


# ---------------------------------------------------------------- ansatz

def assemble_field(F, phi, cyl, R=None):
    """f(x) = F(l_x) Phi(x_perp / R); R defaults to the cylinder's scale."""
    R = cyl.base.R if R is None else float(R)
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    if phi.domain.dim != cyl.d - 1:
        raise InvalidParameter(
            f"{phi.id} lives in dimension {phi.domain.dim}, the cylinder needs {cyl.d - 1}")
    values = F.at(cyl.site_levels) * phi(cyl.perp() / R)
    return PerturbationField(cyl, values)


def remove_level_means(f):
    """Subtract from f its mean over each level set Gamma_l.

    The overlap of psi^x with any ground state depends on x only through its
    level, so the result spans a state orthogonal to the whole kernel of H.
    Only such states give Rayleigh quotients that bound the gap from above.
    """
    cyl = f.cylinder
    vals = f.values.copy()
    for idx in cyl.levels.values():
        if len(idx):
            vals[idx] -= vals[idx].mean()
    return PerturbationField(cyl, vals)


def ansatz_rayleigh(phi, cyl, spec, a, orthogonal=False):
    """Exact Rayleigh quotient of the optimal-profile ansatz on ``cyl``.

    With ``orthogonal=True`` level means are removed first (see
    remove_level_means); returns nan when nothing is left.
    """
    F = optimal_profile(None, spec, a, levels=sorted(cyl.levels))
    f = assemble_field(F, phi, cyl)
    if orthogonal:
        f = remove_level_means(f)
        if np.linalg.norm(f.values) <= 1e-12 * max(1.0, np.max(np.abs(phi(cyl.perp() / cyl.base.R)))):
            return float("nan")
    return rayleigh(f, spec, a)


def normalized_energy_closed_form(phi, R, L, spec, a):
    """(sech(alpha) / 2 R^2) * (||grad Phi||^2 / ||Phi||^2) * g over Omega."""
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    quotient = phi.dirichlet_quotient()
    return a.sech_alpha / (2.0 * R * R) * quotient * g_function(L, spec, a).g


def gap_bound(lam1, R, spec, a, L):
    """lambda_1 g / (2 Delta R^2); the O(1/R^2) correction is left to error_bounds."""
    if not lam1 > 0:
        raise InvalidParameter(f"lambda_1 must be positive, got {lam1}")
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    return lam1 * g_function(L, spec, a).g / (2.0 * a.delta * R * R)


# ---------------------------------------------------------------- PHP

def apply_php(values, h, R, L, spec, a):
    """Psi = -(sech(alpha) / 2 R^2) g Laplacian(Phi) on a regular grid.

    ``values`` holds Phi on the grid nodes of a box (1-D or 2-D array, spacing
    h); the outermost ring is the Dirichlet boundary and the result is
    returned on the interior nodes.
    """
    u = np.asarray(values)
    if u.ndim not in (1, 2):
        raise InvalidParameter("grid function must be 1-D or 2-D")
    if min(u.shape) < 5:
        raise InvalidParameter(
            f"grid {u.shape} has fewer than 3 interior points per axis")
    if not h > 0:
        raise InvalidParameter("grid spacing must be positive")
    inner = (slice(1, -1),) * u.ndim
    lap = -2.0 * u.ndim * u[inner]
    for axis in range(u.ndim):
        for step in (-1, 1):
            sl = [slice(1, -1)] * u.ndim
            sl[axis] = slice(1 + step, u.shape[axis] - 1 + step)
            lap = lap + u[tuple(sl)]
    lap = lap / (h * h)
    return -(a.sech_alpha / (2.0 * R * R)) * g_function(L, spec, a).g * lap


def php_scalar(lam, R, L, spec, a):
    """Eigenvalue of apply_php on an eigenfunction of -Laplacian with eigenvalue lam."""
    return a.sech_alpha / (2.0 * R * R) * g_function(L, spec, a).g * lam


# ---------------------------------------------------------------- scans

SCAN_FIELDS = ("delta", "mu", "L", "R", "g", "lower_bound", "upper_bound",
               "normalized_energy", "gap_bound")


def scan_row(delta, mu, L, R=None, phi=None, lam1=None):
    a = make_aniso(delta, degenerate=(delta == 1.0))
    spec = interface(mu)
    gv = g_function(L, spec, a)
    row = {"delta": a.delta, "mu": float(mu), "L": int(L), "R": float("nan") if R is None else float(R),
           "g": gv.g, "lower_bound": g_lower_bound(a), "upper_bound": 1.0,
           "normalized_energy": float("nan"), "gap_bound": float("nan")}
    if R is not None and phi is not None:
        row["normalized_energy"] = normalized_energy_closed_form(phi, R, L, spec, a)
    if R is not None and lam1 is not None:
        row["gap_bound"] = gap_bound(lam1, R, spec, a, L)
    return row
