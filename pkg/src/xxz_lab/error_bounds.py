"""Riemann-sum error bounds on the base lattice and certified Rayleigh intervals.

Each base site x carries its Voronoi cell in the level-0 sublattice.  Since
the cell is centrally symmetric about x, the linear Taylor term integrates to
zero and

    | (1/|Gamma|) sum_x u(x/R) - (1/m(Omega_V)) int_{Omega_V} u |
        <= ||Hess u||_op * (half second moment of the cell) / R^2,

with Omega_V the union of the scaled cells.  Omega_V differs from Omega only
inside the band of width delta = (cell circumradius)/R around the boundary,
so the two continuum averages differ by at most

    (sup_band |u| * m(Omega_V sym-diff Omega) + |avg_Omega u| * |m(Omega) - m(Omega_V)|) / m(Omega_V),

which is reported as the boundary term.  sup_band is bounded from samples of
the boundary plus a Lipschitz correction.

The certified interval combines these with eps_1, eps_2, eps_3 and with the
bonds cut off by the boundary of Lambda, level by level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Polygon as ShapelyPolygon

from .domains import Disk, Interval, Polygon, Rectangle
from .energy import rayleigh
from .exceptions import CertificationError, InvalidParameter
from .lattice import make_cylinder, perp_coords
from .states import sech
from .variational import assemble_field, optimal_profile

OUTWARD = 1e-12  # relative widening of the final interval against rounding
ROUNDOFF_FLOOR = 1e-24


# ---------------------------------------------------------------- Voronoi cells

@dataclass(frozen=True, eq=False)
class VoronoiData:
    d: int
    cell_volume: float
    half_second_moment: float
    nearest_neighbor_distance: float
    vertices: np.ndarray  # cell vertices in hyperplane coordinates (end points when d = 2)

    @property
    def circumradius(self):
        return float(np.max(np.linalg.norm(self.vertices.reshape(len(self.vertices), -1), axis=1)))

    @property
    def centroid(self):
        return self.vertices.reshape(len(self.vertices), -1).mean(axis=0)


def voronoi_moment(d):
    """Exact Voronoi cell of the level-0 sublattice of Z^d (d = 2 or 3)."""
    if d == 2:
        half = np.sqrt(2.0) / 2
        return VoronoiData(2, np.sqrt(2.0), 1.0 / 12.0, np.sqrt(2.0), np.array([[-half], [half]]))
    if d == 3:
        nn = np.sqrt(2.0)
        # the six shortest vectors of the triangular lattice, in hyperplane coordinates
        gens = perp_coords(np.array([[1, -1, 0], [0, 1, -1], [1, 0, -1],
                                     [-1, 1, 0], [0, -1, 1], [-1, 0, 1]]))
        ang = np.sort(np.arctan2(gens[:, 1], gens[:, 0]))
        mid = ang + np.pi / 6  # cell vertices sit between neighbour directions
        side = nn / np.sqrt(3.0)
        verts = side * np.column_stack([np.cos(mid), np.sin(mid)])
        area = 1.5 * np.sqrt(3.0) * side ** 2
        return VoronoiData(3, float(area), 5.0 / 24.0 * side ** 2, nn, verts)
    raise InvalidParameter(f"Voronoi data is available for d = 2 and 3 only, got d={d}")


def riemann_error_bound(hess_norm, vd, R):
    """Lemma bound ||Hess u||_op * half_second_moment / R^2 for u(x) = U(x/R)."""
    if hess_norm is None or not np.isfinite(hess_norm):
        raise InvalidParameter("a finite Hessian sup-norm is required")
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    return float(hess_norm) * vd.half_second_moment / (R * R)


# ---------------------------------------------------------------- geometry of Omega_V

def _domain_polygons(domain):
    """(inner, outer) shapely polygons with inner within Omega within outer."""
    if isinstance(domain, Rectangle):
        p = ShapelyPolygon(domain.polygon())
        return p, p
    if isinstance(domain, Polygon):
        p = ShapelyPolygon(domain.polygon())
        return p, p
    if isinstance(domain, Disk):
        return ShapelyPolygon(domain.polygon(720)), ShapelyPolygon(domain.polygon(720, outer=True))
    raise InvalidParameter(f"no polygon model for {domain.describe()}")


def cell_union_mismatch(points, domain, vd, R):
    """(m(Omega_V), upper bound on m(Omega_V sym-diff Omega)) for scaled sites ``points``."""
    pts = np.asarray(points, dtype=float)
    if isinstance(domain, Interval):
        c = vd.nearest_neighbor_distance / (2.0 * R)
        x = np.sort(pts[:, 0])
        segs = []
        for v in x:
            if segs and v - c <= segs[-1][1] + 1e-14:
                segs[-1][1] = v + c
            else:
                segs.append([v - c, v + c])
        union = sum(b - a for a, b in segs)
        inter = sum(max(0.0, min(b, domain.hi) - max(a, domain.lo)) for a, b in segs)
        return union, union + domain.measure - 2.0 * inter
    cells = [ShapelyPolygon(vd.vertices / R + p) for p in pts]
    union = shapely.unary_union(cells)
    inner, outer = _domain_polygons(domain)
    m_union = union.area
    return m_union, m_union + outer.area - 2.0 * union.intersection(inner).area


def boundary_term(sup_band, avg, points, domain, vd, R):
    """Bound on |avg over Omega_V - avg over Omega| of u; see the module docstring."""
    m_union, mismatch = cell_union_mismatch(points, domain, vd, R)
    return (sup_band * max(mismatch, 0.0) + abs(avg) * abs(domain.measure - m_union)) / m_union


def boundary_samples(domain, n=4096):
    """Points on the boundary and the largest gap between neighbours along it."""
    if isinstance(domain, Interval):
        return np.array([[domain.lo], [domain.hi]]), 0.0
    if isinstance(domain, Disk):
        th = 2 * np.pi * np.arange(n) / n
        pts = domain.rad * np.column_stack([np.cos(th), np.sin(th)]) + np.asarray(domain.center)
        return pts, 2 * np.pi * domain.rad / n
    verts = np.asarray(domain.polygon(), dtype=float)
    edges = np.roll(verts, -1, axis=0) - verts
    length = np.linalg.norm(edges, axis=1)
    per = max(2, n // len(verts))
    t = np.arange(per) / per
    pts = np.concatenate([v + np.outer(t, e) for v, e in zip(verts, edges)])
    return pts, float(np.max(length)) / per


def band_sups(phi, sn, delta):
    """Upper bounds on sup |Phi| and sup |grad Phi| within distance delta of the boundary."""
    pts, gap = boundary_samples(phi.domain)
    reach = 0.5 * gap + delta
    val = float(np.max(np.abs(phi(pts)))) + sn.grad * reach
    grad = float(np.max(np.linalg.norm(phi.grad(pts), axis=-1))) + sn.hess * reach
    return min(val, sn.value), min(grad, sn.grad)


def level_point_sets(cyl):
    """Scaled hyperplane coordinates of each level set Gamma_l, keyed by level."""
    perp = cyl.perp() / cyl.base.R
    return {l: perp[idx] for l, idx in cyl.levels.items()}


# ---------------------------------------------------------------- eps budget

@dataclass(frozen=True)
class ErrorBudget:
    eps1: float
    eps2: float
    eps3: float

    def scaled(self, measure):
        return ErrorBudget(self.eps1 * measure, self.eps2 * measure, self.eps3 * measure)


def epsilon_budget(phi, R, d):
    """eps_1 = H_abs2 / R^2, eps_2 = (d/R)(G + H/(4R)) H, eps_3 = H_grad2 / R^2.

    G = sup|grad Phi|, H = sup||Hess Phi||, H_abs2 and H_grad2 the Hessian
    sup-norms of |Phi|^2 and |grad Phi|^2.  The bounds are per unit measure
    of Omega (they perturb averages, not integrals).
    """
    sn = getattr(phi, "sup_norms", phi)
    vals = [getattr(sn, k, None) for k in ("grad", "hess", "hess_abs2", "hess_grad2")]
    if any(v is None or not np.isfinite(v) for v in vals):
        raise InvalidParameter("sup-norm data is missing")
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    G, H, Ha, Hg = vals
    return ErrorBudget(Ha / R ** 2, (d / R) * (G + H / (4.0 * R)) * H, Hg / R ** 2)


# ---------------------------------------------------------------- lemma check

@dataclass(frozen=True)
class AverageCheck:
    phi_id: str
    R: float
    level: int
    quantity: str  # "abs2" or "grad2"
    lattice_average: float
    continuum_average: float
    lemma_bound: float
    boundary: float

    @property
    def discrepancy(self):
        return abs(self.lattice_average - self.continuum_average)

    @property
    def within(self):
        return self.discrepancy <= (self.lemma_bound + self.boundary) * (1 + OUTWARD) + 1e-15


def lattice_reach(cyl):
    """Half-width of a coordinate box holding every site, cell and bond of ``cyl`` (scaled)."""
    vd = voronoi_moment(cyl.d)
    slack = max(vd.circumradius, 1.0) / cyl.base.R
    return float(np.max(np.abs(cyl.perp()))) / cyl.base.R + slack


def _quantities(phi, sn, delta):
    n2, g2 = phi.integrals()
    m = phi.domain.measure
    bv, bg = band_sups(phi, sn, delta)
    return {
        "abs2": (lambda p: np.abs(phi(p)) ** 2, n2 / m, sn.hess_abs2, bv ** 2),
        "grad2": (lambda p: np.sum(np.abs(phi.grad(p)) ** 2, axis=-1), g2 / m, sn.hess_grad2,
                  bg ** 2),
    }


def lemma_checks(phi, cyl):
    """Lattice vs continuum averages of |Phi|^2 and |grad Phi|^2 on each distinct level shift."""
    d, R = cyl.d, cyl.base.R
    vd = voronoi_moment(d)
    sn = phi.bounds(lattice_reach(cyl)) if phi.sup_norms.certified else phi.sup_norms
    sets = level_point_sets(cyl)
    # level sets repeat (up to a lattice translation) with period d
    reps = {}
    for l in sorted(sets):
        reps.setdefault(l % d, l)
    out = []
    for name, (u, cont, hess, band) in _quantities(phi, sn, vd.circumradius / R).items():
        lemma = riemann_error_bound(hess, vd, R)
        for l in reps.values():
            pts = sets[l]
            out.append(AverageCheck(phi.id, R, l, name, float(np.mean(u(pts))), cont, lemma,
                                    boundary_term(band, cont, pts, phi.domain, vd, R)))
    return out


# ---------------------------------------------------------------- certified interval

@dataclass(frozen=True)
class CertifiedInterval:
    lower: float
    upper: float
    budget: ErrorBudget
    boundary_abs2: float  # worst level
    boundary_grad2: float
    missing_bonds: float  # worst level, in units of the grad-squared average
    certified: bool  # False for sampled sup-norms or lattices outside their validity box
    reason: str = ""

    def contains(self, value):
        return self.lower <= value <= self.upper


def _norms_for(phi, cyl):
    """Sup-norms valid on everything the lattice touches, plus a flag and reason."""
    if not phi.sup_norms.certified:
        return phi.sup_norms, False, "sup-norms are sampled, not certified"
    reach = lattice_reach(cyl)
    sn = phi.bounds(reach)
    if reach > sn.valid:
        return sn, False, f"lattice reaches outside the box |coord| <= {sn.valid:g} where sup-norms hold"
    return sn, True, ""


def certified_normalized_energy_interval(phi, R, L, spec, a, cyl=None, strict=True):
    """Interval that provably contains the Rayleigh quotient of the optimal-profile ansatz.

    Per level l the average B_l of |Phi|^2 lies within eps_1 plus a boundary
    term of its continuum value, and the bond sum A_l (scaled by R^2/|Gamma|)
    within eps_2 + eps_3 plus a boundary term of the average of |grad Phi|^2,
    less the contribution of the bonds that leave Lambda.  The quotient is

        sech(alpha) / (2 R^2) * sum_l c_l^2 A_l / sum_l F_l^2 B_l,

    c_l^2 = sech(a_l) sech(a_{l+1}) / 4, F_l^2 = sech(a_l)^2 / 4.  If the
    lower end of the denominator is not positive, R is too small to certify:
    CertificationError when ``strict``, else the upper end is +inf.
    """
    d = phi.domain.dim + 1
    if cyl is None:
        cyl = make_cylinder(phi.domain, R, d, L)
    vd = voronoi_moment(d)
    sn, certified, reason = _norms_for(phi, cyl)
    budget = epsilon_budget(sn, R, d)
    n2, g2 = phi.integrals()
    m = phi.domain.measure
    avg_abs2, avg_grad2 = n2 / m, g2 / m
    band_val, band_grad = band_sups(phi, sn, vd.circumradius / R)

    levels = np.array(sorted(cyl.levels))
    sets = level_point_sets(cyl)
    n_base = len(cyl.base)
    bonds_per_level = np.bincount(cyl.bond_levels() - levels[0], minlength=len(levels))
    edge_sq = 1.0 - 1.0 / d  # |e_j projected|^2

    bdry_cache = {}

    def bdry(l):
        key = l % d
        if key not in bdry_cache:
            bdry_cache[key] = (
                boundary_term(band_val ** 2, avg_abs2, sets[l], phi.domain, vd, R),
                boundary_term(band_grad ** 2, avg_grad2, sets[l], phi.domain, vd, R))
        return bdry_cache[key]

    s = sech(a.alpha * (levels - spec.mu))
    F2 = 0.25 * s * s
    c2 = 0.25 * s[:-1] * s[1:]
    b_lo, b_hi, a_lo, a_hi = [], [], [], []
    worst_missing = 0.0
    for i, l in enumerate(levels):
        ba, bg = bdry(l)
        b_lo.append(avg_abs2 - budget.eps1 - ba)
        b_hi.append(avg_abs2 + budget.eps1 + ba)
        if i < len(levels) - 1:
            missing = (d * n_base - bonds_per_level[i]) / n_base * sn.grad ** 2 * edge_sq
            worst_missing = max(worst_missing, missing)
            spread = budget.eps2 + budget.eps3 + bg
            a_lo.append(max(avg_grad2 - spread - missing, 0.0))
            a_hi.append(avg_grad2 + spread)
    num_lo, num_hi = float(np.dot(c2, a_lo)), float(np.dot(c2, a_hi))
    den_lo, den_hi = float(np.dot(F2, np.maximum(b_lo, 0.0))), float(np.dot(F2, b_hi))
    pref = a.sech_alpha / (2.0 * R * R)
    worst_b = max(bdry(l)[0] for l in levels)
    worst_g = max(bdry(l)[1] for l in levels)
    if avg_grad2 == 0.0 and sn.grad == 0.0:
        lo = hi = 0.0  # constant Phi: the ansatz is the zero mode
    elif den_lo <= 0.0:
        if strict:
            raise CertificationError(
                f"R = {R:g} too small to certify {phi.id}: norm interval reaches zero")
        lo, hi = pref * num_lo / den_hi, float("inf")
        certified, reason = False, reason or "R too small to certify"
    else:
        lo, hi = pref * num_lo / den_hi, pref * num_hi / den_lo
    # widen outward; the absolute floor covers roundoff in a vanishing energy
    return CertifiedInterval(lo * (1 - OUTWARD), hi * (1 + OUTWARD) + pref * ROUNDOFF_FLOOR, budget,
                             worst_b, worst_g, worst_missing, certified, reason)


# ---------------------------------------------------------------- report rows

REPORT_FIELDS = ("phi_id", "R", "eps1", "eps2", "eps3", "boundary_term", "interval_lo",
                 "interval_hi", "exact_rayleigh", "contained")


def error_report_row(phi, R, L, spec, a, cyl=None):
    d = phi.domain.dim + 1
    cyl = make_cylinder(phi.domain, R, d, L) if cyl is None else cyl
    iv = certified_normalized_energy_interval(phi, R, L, spec, a, cyl=cyl, strict=False)
    F = optimal_profile(None, spec, a, levels=sorted(cyl.levels))
    exact = rayleigh(assemble_field(F, phi, cyl), spec, a)
    return {"phi_id": phi.id, "R": float(R), "eps1": iv.budget.eps1, "eps2": iv.budget.eps2,
            "eps3": iv.budget.eps3, "boundary_term": max(iv.boundary_abs2, iv.boundary_grad2),
            "interval_lo": iv.lower, "interval_hi": iv.upper, "exact_rayleigh": exact,
            "contained": bool(iv.contains(exact))}
