"""Cylindrical lattices Lambda = Gamma + Sigma_L along the (1,...,1) axis.

A site is an integer vector x in Z^d with level l(x) = sum_j x_j.  The stick
Sigma_L is the staircase through the origin with x_n - x_{n-1} = e_{n mod d}
(residue 0 meaning direction d), cut to levels -L/2..L/2.  The base Gamma is a
finite part of the level-0 sublattice, and an oriented bond (x, x + e_j) joins
each site to its neighbours one level up whenever both ends lie in Lambda.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .domains import Shape
from .exceptions import EmptyRegionError, InvalidParameter


def level(x):
    """l(x) = x . (1,...,1); works on one site or an (n, d) array."""
    return np.asarray(x).sum(axis=-1)


def step_direction(n, d):
    """1-based coordinate direction of the stick step x_n - x_{n-1}."""
    j = n % d
    return d if j == 0 else j


def kernel_generators(d):
    """Integer basis e_j - e_{j+1} (j = 1..d-1) of the level-0 sublattice."""
    g = np.zeros((d - 1, d), dtype=np.int64)
    for j in range(d - 1):
        g[j, j] = 1
        g[j, j + 1] = -1
    return g


def perp_basis(d):
    """Orthonormal basis (rows) of the hyperplane orthogonal to (1,...,1).

    Obtained by Gram-Schmidt on the kernel generators, so the first vector is
    (e_1 - e_2)/sqrt(2).
    """
    basis = []
    for g in kernel_generators(d).astype(float):
        for b in basis:
            g = g - np.dot(g, b) * b
        basis.append(g / np.linalg.norm(g))
    return np.array(basis)


def perp_coords(x):
    """Coordinates of the projection of sites x onto the hyperplane."""
    x = np.asarray(x, dtype=float)
    return x @ perp_basis(x.shape[-1]).T


@dataclass(frozen=True, eq=False)
class Stick:
    points: np.ndarray  # integer coordinates, one per level, ordered by level

    @property
    def d(self):
        return self.points.shape[1]

    @property
    def levels(self):
        return level(self.points)

    @property
    def height(self):
        return len(self.points) - 1

    @property
    def half_height(self):
        return self.height // 2


def build_stick(d, L):
    """Finite stick of L+1 points with levels -L/2..L/2."""
    if int(d) != d or d < 2:
        raise InvalidParameter(f"dimension must be an integer >= 2, got {d}")
    if int(L) != L or L < 0 or L % 2:
        raise InvalidParameter(f"L must be a non-negative even integer, got {L}")
    half = int(L) // 2
    return stick_segment(d, -half, half)


def stick_segment(d, first, last):
    """Piece of the infinite stick covering levels first..last (any integers).

    Used for chains with an even number of sites, which a symmetric stick
    cannot produce.
    """
    if int(d) != d or d < 2:
        raise InvalidParameter(f"dimension must be an integer >= 2, got {d}")
    if int(first) != first or int(last) != last or last < first:
        raise InvalidParameter(f"need integer levels first <= last, got {first}, {last}")
    d, first, last = int(d), int(first), int(last)
    eye = np.eye(d, dtype=np.int64)
    pts = {0: np.zeros(d, dtype=np.int64)}
    for n in range(1, max(last, 0) + 1):
        pts[n] = pts[n - 1] + eye[step_direction(n, d) - 1]
    for n in range(0, min(first, 0), -1):
        pts[n - 1] = pts[n] - eye[step_direction(n, d) - 1]
    return Stick(np.array([pts[n] for n in range(first, last + 1)]))


@dataclass(frozen=True, eq=False)
class BaseRegion:
    shape: Shape | None
    R: float
    sites: np.ndarray  # (m, d) integer coordinates, all at level 0

    @property
    def d(self):
        return self.sites.shape[1]

    def __len__(self):
        return len(self.sites)


def build_base(shape, R, d):
    """All level-0 sites whose projection lies in the closed domain R * shape."""
    if not R > 0:
        raise InvalidParameter(f"R must be positive, got {R}")
    if int(d) != d or d < 2:
        raise InvalidParameter(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    if shape.dim != d - 1:
        raise InvalidParameter(
            f"{shape.name} is {shape.dim}-dimensional but the base of a d={d} cylinder "
            f"needs a {d - 1}-dimensional domain")
    gens = kernel_generators(d)
    # x = sum_j c_j (e_j - e_{j+1}) has c_j = x_1 + ... + x_j, so |c_j| <= j * |x|
    reach = shape.radius * R
    ranges = [range(-int(np.floor(j * reach)) - 1, int(np.floor(j * reach)) + 2)
              for j in range(1, d)]
    coeffs = np.array(list(product(*ranges)), dtype=np.int64)
    sites = coeffs @ gens
    inside = shape.contains(perp_coords(sites) / R)
    sites = sites[inside]
    if len(sites) == 0:
        raise EmptyRegionError(f"no lattice sites inside {shape.describe()} scaled by R={R}")
    order = np.lexsort(sites.T[::-1])
    return BaseRegion(shape, float(R), sites[order])


def base_from_sites(sites, R=1.0):
    """Base region from an explicit list of level-0 sites (no domain)."""
    sites = np.atleast_2d(np.asarray(sites, dtype=np.int64))
    if np.any(level(sites) != 0):
        raise InvalidParameter("base sites must all have level 0")
    if len({tuple(s) for s in sites}) != len(sites):
        raise InvalidParameter("duplicate base sites")
    return BaseRegion(None, float(R), sites)


@dataclass(frozen=True, eq=False)
class Cylinder:
    base: BaseRegion
    stick: Stick
    sites: np.ndarray  # (n, d) integer coordinates
    site_levels: np.ndarray  # (n,)
    levels: dict  # level -> array of site indices (Gamma_l)
    bonds: np.ndarray  # (m, 3): lower index, upper index, direction j (1-based)
    index: dict = field(repr=False)  # coordinate tuple -> site index

    @property
    def d(self):
        return self.sites.shape[1]

    @property
    def L(self):
        return self.stick.height

    def __len__(self):
        return len(self.sites)

    @property
    def n_sites(self):
        return len(self.sites)

    def perp(self):
        """Hyperplane coordinates of every site."""
        return perp_coords(self.sites)

    def bond_levels(self):
        return self.site_levels[self.bonds[:, 0]]


def build_cylinder(base, stick):
    """Lambda = Gamma + Sigma_L with its oriented bond set B(Lambda)."""
    if base.d != stick.d:
        raise InvalidParameter(f"base is in Z^{base.d} but stick is in Z^{stick.d}")
    index = {}
    coords = []
    for s in stick.points:  # stick is ordered by level, so levels come out contiguous
        for g in base.sites:
            key = tuple(int(c) for c in g + s)
            if key not in index:
                index[key] = len(coords)
                coords.append(key)
    sites = np.array(coords, dtype=np.int64).reshape(-1, stick.d)
    lv = level(sites)
    levels = {int(l): np.flatnonzero(lv == l) for l in stick.levels}
    bonds = []
    for i, x in enumerate(coords):
        for j in range(stick.d):
            y = list(x)
            y[j] += 1
            k = index.get(tuple(y))
            if k is not None:
                bonds.append((i, k, j + 1))
    bonds = np.array(bonds, dtype=np.int64).reshape(-1, 3)
    return Cylinder(base, stick, sites, lv, levels, bonds, index)


def make_cylinder(shape, R, d, L):
    return build_cylinder(build_base(shape, R, d), build_stick(d, L))


def chain(d, L):
    """Cylinder over the single-site base {0}: the bare stick."""
    return build_cylinder(base_from_sites(np.zeros((1, d), dtype=np.int64)), build_stick(d, L))


def chain_of(d, n_sites):
    """Bare stick with exactly ``n_sites`` sites, levels -(n-1)//2 .. n//2."""
    if int(n_sites) != n_sites or n_sites < 1:
        raise InvalidParameter(f"need at least one site, got {n_sites}")
    n = int(n_sites)
    first = -((n - 1) // 2)
    return build_cylinder(base_from_sites(np.zeros((1, d), dtype=np.int64)),
                          stick_segment(d, first, first + n - 1))


def write_sites_csv(cyl, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["site_index"] + [f"coord_{j + 1}" for j in range(cyl.d)] + ["level"])
        for i, (x, l) in enumerate(zip(cyl.sites, cyl.site_levels)):
            w.writerow([i, *map(int, x), int(l)])


def write_bonds_csv(cyl, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lower_index", "upper_index", "direction"])
        for row in cyl.bonds:
            w.writerow([int(v) for v in row])
