"""Bounded domains Omega in the hyperplane orthogonal to (1,...,1).

Coordinates are Euclidean coordinates with respect to an orthonormal basis of
that hyperplane (see :func:`xxz_lab.lattice.perp_basis`).  Every shape is
closed for membership tests: points on the boundary count as inside.

Integrals use Gauss-Legendre tensor rules whose order is doubled until two
successive estimates agree to the requested relative tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameter

_TIE = 1e-12


def _gauss(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _adaptive(rule, rtol, n0, nmax):
    n = n0
    prev = rule(n)
    while True:
        n *= 2
        cur = rule(n)
        if abs(cur - prev) <= rtol * abs(cur) + 1e-300 or n >= nmax:
            return cur
        prev = cur


class Shape:
    """Common interface of the supported domains."""

    name = "shape"
    dim = 0

    def contains(self, pts, closed=True):
        raise NotImplementedError

    @property
    def measure(self):
        raise NotImplementedError

    @property
    def radius(self):
        """Largest distance from the origin to a point of the shape."""
        raise NotImplementedError

    def bounds(self):
        raise NotImplementedError

    def integrate(self, fn, rtol=1e-10):
        raise NotImplementedError

    def _as_points(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.dim)
        if pts.shape[-1] != self.dim:
            raise InvalidParameter(
                f"{self.name} lives in {self.dim} dimensions, got points of width {pts.shape[-1]}")
        return pts


@dataclass(frozen=True)
class Interval(Shape):
    length: float = 1.0
    center: float = 0.0

    name = "interval"
    dim = 1

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidParameter("interval length must be positive")

    @property
    def lo(self):
        return self.center - 0.5 * self.length

    @property
    def hi(self):
        return self.center + 0.5 * self.length

    def contains(self, pts, closed=True):
        t = self._as_points(pts)[:, 0]
        tol = _TIE * max(1.0, self.length) if closed else -_TIE * max(1.0, self.length)
        return (t >= self.lo - tol) & (t <= self.hi + tol)

    @property
    def measure(self):
        return self.length

    @property
    def radius(self):
        return max(abs(self.lo), abs(self.hi))

    def bounds(self):
        return np.array([self.lo]), np.array([self.hi])

    def integrate(self, fn, rtol=1e-10):
        def rule(n):
            x, w = _gauss(n, self.lo, self.hi)
            return np.sum(w * fn(x[:, None]))
        return _adaptive(rule, rtol, 32, 1 << 14)

    def describe(self):
        return f"interval(length={self.length:g}, center={self.center:g})"


@dataclass(frozen=True)
class Rectangle(Shape):
    a: float = 1.0
    b: float = 1.0
    center: tuple = (0.0, 0.0)

    name = "rectangle"
    dim = 2

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidParameter("rectangle sides must be positive")

    def bounds(self):
        c = np.asarray(self.center, dtype=float)
        half = 0.5 * np.array([self.a, self.b])
        return c - half, c + half

    def contains(self, pts, closed=True):
        p = self._as_points(pts)
        lo, hi = self.bounds()
        tol = _TIE * max(1.0, self.a, self.b)
        tol = tol if closed else -tol
        return np.all((p >= lo - tol) & (p <= hi + tol), axis=1)

    @property
    def measure(self):
        return self.a * self.b

    @property
    def radius(self):
        lo, hi = self.bounds()
        corners = np.array([[x, y] for x in (lo[0], hi[0]) for y in (lo[1], hi[1])])
        return float(np.max(np.linalg.norm(corners, axis=1)))

    def integrate(self, fn, rtol=1e-10):
        lo, hi = self.bounds()

        def rule(n):
            x, wx = _gauss(n, lo[0], hi[0])
            y, wy = _gauss(n, lo[1], hi[1])
            X, Y = np.meshgrid(x, y, indexing="ij")
            vals = fn(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
            return wx @ vals @ wy
        return _adaptive(rule, rtol, 16, 1024)

    def polygon(self):
        lo, hi = self.bounds()
        return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])

    def describe(self):
        return f"rectangle(a={self.a:g}, b={self.b:g})"


def Square(side=1.0, center=(0.0, 0.0)):
    return Rectangle(side, side, tuple(center))


@dataclass(frozen=True)
class Disk(Shape):
    rad: float = 1.0
    center: tuple = (0.0, 0.0)

    name = "disk"
    dim = 2

    def __post_init__(self):
        if not self.rad > 0:
            raise InvalidParameter("disk radius must be positive")

    def contains(self, pts, closed=True):
        p = self._as_points(pts) - np.asarray(self.center, dtype=float)
        r = np.linalg.norm(p, axis=1)
        tol = _TIE * max(1.0, self.rad)
        return r <= self.rad + tol if closed else r < self.rad - tol

    @property
    def measure(self):
        return np.pi * self.rad ** 2

    @property
    def radius(self):
        return float(np.linalg.norm(self.center)) + self.rad

    def bounds(self):
        c = np.asarray(self.center, dtype=float)
        return c - self.rad, c + self.rad

    def integrate(self, fn, rtol=1e-10):
        c = np.asarray(self.center, dtype=float)

        def rule(n):
            r, wr = _gauss(n, 0.0, self.rad)
            th = 2 * np.pi * np.arange(2 * n) / (2 * n)
            R, T = np.meshgrid(r, th, indexing="ij")
            pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()]) + c
            vals = fn(pts).reshape(R.shape)
            return (2 * np.pi / (2 * n)) * np.sum((wr * r) @ vals)
        return _adaptive(rule, rtol, 16, 1024)

    def polygon(self, n=512, outer=False):
        """Inscribed (default) or circumscribed regular n-gon."""
        th = 2 * np.pi * np.arange(n) / n
        rho = self.rad / np.cos(np.pi / n) if outer else self.rad
        return np.column_stack([rho * np.cos(th), rho * np.sin(th)]) + np.asarray(self.center)

    def describe(self):
        return f"disk(radius={self.rad:g})"


def _triangle_rule(n, p0, p1, p2):
    """Collapsed (Duffy) Gauss rule on a triangle: points and weights."""
    u, wu = _gauss(n, 0.0, 1.0)
    U, V = np.meshgrid(u, u, indexing="ij")
    W = np.outer(wu, wu) * U
    s = U.ravel()
    t = (U * V).ravel()
    pts = p0 + np.outer(s - t, p1 - p0) + np.outer(t, p2 - p0)
    jac = abs(np.cross(p1 - p0, p2 - p0))
    return pts, W.ravel() * jac


def polygon_area(vertices):
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class Polygon(Shape):
    """Simple polygon, star-shaped with respect to its vertex centroid."""

    vertices: tuple

    name = "polygon"
    dim = 2

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidParameter("polygon needs at least three 2-D vertices")
        if polygon_area(v) <= 0:
            raise InvalidParameter("polygon is degenerate")

    @property
    def verts(self):
        return np.asarray(self.vertices, dtype=float)

    def contains(self, pts, closed=True):
        p = self._as_points(pts)
        v = self.verts
        a, b = v, np.roll(v, -1, axis=0)
        x, y = p[:, 0:1], p[:, 1:2]
        # even-odd rule
        cond = (a[:, 1] > y) != (b[:, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
        inside = np.sum(cond & (x < xint), axis=1) % 2 == 1
        # distance to each edge decides ties
        e = b - a
        ee = np.sum(e * e, axis=1)
        tpar = np.clip(((x - a[:, 0]) * e[:, 0] + (y - a[:, 1]) * e[:, 1]) / ee, 0.0, 1.0)
        dx = x - (a[:, 0] + tpar * e[:, 0])
        dy = y - (a[:, 1] + tpar * e[:, 1])
        on_edge = np.min(dx * dx + dy * dy, axis=1) <= (_TIE * max(1.0, self.radius)) ** 2
        return (inside | on_edge) if closed else (inside & ~on_edge)

    @property
    def measure(self):
        return polygon_area(self.verts)

    @property
    def radius(self):
        return float(np.max(np.linalg.norm(self.verts, axis=1)))

    def bounds(self):
        return self.verts.min(axis=0), self.verts.max(axis=0)

    def polygon(self):
        return self.verts

    def integrate(self, fn, rtol=1e-10):
        v = self.verts
        c = v.mean(axis=0)

        def rule(n):
            total = 0.0
            for p1, p2 in zip(v, np.roll(v, -1, axis=0)):
                pts, w = _triangle_rule(n, c, p1, p2)
                total += np.dot(w, fn(pts))
            return total
        return _adaptive(rule, rtol, 8, 512)

    def describe(self):
        return f"polygon({len(self.vertices)} vertices)"


def parse_shape(text):
    """Build a shape from a short descriptor.

    ``interval``, ``interval:2``, ``square``, ``square:1.5``, ``rectangle:1x2``,
    ``disk``, ``disk:0.5`` and ``polygon:x0,y0;x1,y1;...`` are understood.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        if name == "interval":
            return Interval(float(arg) if arg else 1.0)
        if name == "square":
            return Square(float(arg) if arg else 1.0)
        if name == "rectangle":
            a, b = (float(s) for s in arg.lower().split("x")) if arg else (1.0, 1.0)
            return Rectangle(a, b)
        if name == "disk":
            return Disk(float(arg) if arg else 1.0)
        if name == "polygon":
            verts = tuple(tuple(float(c) for c in p.split(",")) for p in arg.split(";"))
            return Polygon(verts)
    except ValueError as exc:
        raise InvalidParameter(f"bad shape descriptor {text!r}: {exc}") from exc
    raise InvalidParameter(f"unknown shape {name!r}")
