"""Closed-form transverse profiles Phi on Omega with certified sup-norm bounds.

Two families are provided:

* separable products A(s) B(t) of one-dimensional factors (sinusoids,
  Gaussians, plane waves, polynomials and their sums/products), on intervals
  and rectangles;
* polynomials in the hyperplane coordinates, on any domain.

Each factor carries bounds M_n >= sup |A^(n)| for n = 0..3.  Sinusoid,
Gaussian and plane-wave bounds hold on the whole line; polynomial bounds hold
on a box enlarged by ``CERT_MARGIN`` around the domain, which is what lets
them cover the Voronoi cells of lattice sites sitting just outside Omega.
The four sup-norms needed downstream are assembled from these with the
product rule and the Frobenius bound on Hessians.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import convolve2d

from .domains import Disk, Interval, Square
from .exceptions import InvalidParameter

CERT_MARGIN = 0.5
SAMPLED_SAFETY = 1.05


# ---------------------------------------------------------------- 1-D factors

class Factor:
    valid = np.inf  # default bounds hold for |t| <= valid

    def deriv(self, t, n):
        raise NotImplementedError

    def bounds(self, reach=None):
        """M_n >= sup |d^n/dt^n| for n = 0..3, on |t| <= reach where that matters."""
        raise NotImplementedError

    def __mul__(self, other):
        return ProductFactor(self, other)

    def __add__(self, other):
        return SumFactor(self, other)


@dataclass(frozen=True)
class Const(Factor):
    c: complex = 1.0

    def deriv(self, t, n):
        return np.full(np.shape(t), self.c if n == 0 else 0.0, dtype=complex)

    def bounds(self, reach=None):
        return np.array([abs(self.c), 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class Sinusoid(Factor):
    """sin(freq * t + phase)."""

    freq: float
    phase: float = 0.0

    def deriv(self, t, n):
        return (self.freq ** n * np.sin(self.freq * t + self.phase + 0.5 * n * np.pi)).astype(complex)

    def bounds(self, reach=None):
        return np.array([abs(self.freq) ** n for n in range(4)])


@dataclass(frozen=True)
class Gaussian(Factor):
    """exp(-(t - center)^2 / (2 width^2))."""

    center: float
    width: float

    def deriv(self, t, n):
        u = (np.asarray(t) - self.center) / self.width
        herm = [1.0, -u, u * u - 1.0, -(u ** 3) + 3.0 * u][n]
        return (herm * np.exp(-0.5 * u * u) / self.width ** n).astype(complex)

    def bounds(self, reach=None):
        # sup_u |He_n(u)| e^{-u^2/2}: n=1 at u=1, n=2 at u=0, n=3 at u^2 = 3 - sqrt(6)
        u3 = np.sqrt(3.0 - np.sqrt(6.0))
        m3 = abs(u3 ** 3 - 3 * u3) * np.exp(-0.5 * u3 * u3)
        w = self.width
        return np.array([1.0, np.exp(-0.5) / w, 1.0 / w ** 2, m3 / w ** 3])


@dataclass(frozen=True)
class PlaneWave(Factor):
    """exp(i kappa t)."""

    kappa: float

    def deriv(self, t, n):
        return (1j * self.kappa) ** n * np.exp(1j * self.kappa * np.asarray(t))

    def bounds(self, reach=None):
        return np.array([abs(self.kappa) ** n for n in range(4)])


@dataclass(frozen=True)
class Poly1(Factor):
    """sum_k coeffs[k] t^k with coefficient-sum bounds on |t| <= valid."""

    coeffs: tuple
    valid: float = 0.5 + CERT_MARGIN

    def deriv(self, t, n):
        c = P.polyder(np.asarray(self.coeffs, dtype=complex), n) if n else np.asarray(self.coeffs, dtype=complex)
        return P.polyval(np.asarray(t, dtype=float), c)

    def bounds(self, reach=None):
        r = self.valid if reach is None else reach
        out = []
        c = np.asarray(self.coeffs, dtype=complex)
        for n in range(4):
            cn = P.polyder(c, n) if n else c
            out.append(float(np.sum(np.abs(cn) * r ** np.arange(len(cn)))))
        return np.array(out)


@dataclass(frozen=True)
class ProductFactor(Factor):
    a: Factor
    b: Factor

    @property
    def valid(self):
        return min(self.a.valid, self.b.valid)

    def deriv(self, t, n):
        return sum(comb(n, k) * self.a.deriv(t, k) * self.b.deriv(t, n - k) for k in range(n + 1))

    def bounds(self, reach=None):
        ma, mb = self.a.bounds(reach), self.b.bounds(reach)
        return np.array([sum(comb(n, k) * ma[k] * mb[n - k] for k in range(n + 1)) for n in range(4)])


@dataclass(frozen=True)
class SumFactor(Factor):
    a: Factor
    b: Factor

    @property
    def valid(self):
        return min(self.a.valid, self.b.valid)

    def deriv(self, t, n):
        return self.a.deriv(t, n) + self.b.deriv(t, n)

    def bounds(self, reach=None):
        return self.a.bounds(reach) + self.b.bounds(reach)


def scaled(c, f):
    return ProductFactor(Const(c), f)


# ---------------------------------------------------------------- shape functions

@dataclass(frozen=True)
class SupNorms:
    grad: float  # sup |grad Phi|
    hess: float  # sup ||Hess Phi||_op
    hess_abs2: float  # sup ||Hess |Phi|^2||_op
    hess_grad2: float  # sup ||Hess |grad Phi|^2||_op
    value: float = np.inf  # sup |Phi|
    certified: bool = True
    valid: float = np.inf  # bounds hold on the box |coord| <= valid

    def as_dict(self):
        return {"value": self.value, "grad": self.grad, "hess": self.hess,
                "hess_abs2": self.hess_abs2, "hess_grad2": self.hess_grad2}


def _product_norms_1d(m):
    return (m[1], m[2], 2 * m[1] ** 2 + 2 * m[0] * m[2], 2 * m[2] ** 2 + 2 * m[1] * m[3])


def _product_norms_2d(a, b):
    """Sup-norm bounds for Phi = A(s) B(t) from the factor bounds a_n, b_n."""
    grad = np.hypot(a[1] * b[0], a[0] * b[1])
    hess = np.sqrt((a[2] * b[0]) ** 2 + 2 * (a[1] * b[1]) ** 2 + (a[0] * b[2]) ** 2)

    def sq(m):  # bounds for |A|^2 and its first two derivatives
        return m[0] ** 2, 2 * m[0] * m[1], 2 * m[1] ** 2 + 2 * m[0] * m[2]

    def dsq(m):  # same for |A'|^2
        return m[1] ** 2, 2 * m[1] * m[2], 2 * m[2] ** 2 + 2 * m[1] * m[3]

    pa, pb = sq(a), sq(b)
    ua, vb = dsq(a), dsq(b)
    hess_abs2 = np.sqrt((pa[2] * pb[0]) ** 2 + 2 * (pa[1] * pb[1]) ** 2 + (pa[0] * pb[2]) ** 2)
    ss = ua[2] * pb[0] + pa[2] * vb[0]
    st = ua[1] * pb[1] + pa[1] * vb[1]
    tt = ua[0] * pb[2] + pa[0] * vb[2]
    hess_grad2 = np.sqrt(ss ** 2 + 2 * st ** 2 + tt ** 2)
    return grad, hess, hess_abs2, hess_grad2


class ShapeFunction:
    """Phi on a domain, evaluated in hyperplane coordinates scaled to Omega."""

    def __init__(self, ident, domain, description=""):
        self.id = ident
        self.domain = domain
        self.description = description
        self._integrals = None

    # subclasses provide deriv(p, multi) where multi is a tuple of axis indices
    def deriv(self, p, multi):
        raise NotImplementedError

    @property
    def sup_norms(self):
        """Bounds on the default box (domain plus CERT_MARGIN)."""
        return self.bounds()

    def bounds(self, reach=None):
        """SupNorms valid on the box |coord_k| <= reach (default: domain plus margin)."""
        raise NotImplementedError

    def _points(self, p):
        p = np.asarray(p, dtype=float)
        return p.reshape(-1, self.domain.dim) if p.ndim == 1 else p

    def __call__(self, p):
        return self.deriv(self._points(p), ())

    def grad(self, p):
        p = self._points(p)
        return np.stack([self.deriv(p, (k,)) for k in range(self.domain.dim)], axis=-1)

    def hessian(self, p):
        p = self._points(p)
        k = self.domain.dim
        return np.stack([np.stack([self.deriv(p, (i, j)) for j in range(k)], -1) for i in range(k)], -2)

    def integrals(self):
        """(int |Phi|^2, int |grad Phi|^2) over Omega, relative accuracy 1e-10."""
        if self._integrals is None:
            n2 = self.domain.integrate(lambda p: np.abs(self(p)) ** 2)
            g2 = self.domain.integrate(lambda p: np.sum(np.abs(self.grad(p)) ** 2, axis=-1))
            self._integrals = (float(n2), float(g2))
        return self._integrals

    def dirichlet_quotient(self):
        n2, g2 = self.integrals()
        if n2 == 0:
            raise InvalidParameter(f"shape function {self.id} vanishes identically")
        return g2 / n2

    def is_constant(self):
        return self.sup_norms.grad == 0.0

    def __repr__(self):
        return f"ShapeFunction({self.id!r} on {self.domain.describe()})"


class SeparableShape(ShapeFunction):
    def __init__(self, ident, domain, factors, description=""):
        super().__init__(ident, domain, description)
        if len(factors) != domain.dim:
            raise InvalidParameter(f"{domain.name} needs {domain.dim} factors, got {len(factors)}")
        self.factors = tuple(factors)

    def deriv(self, p, multi):
        out = np.ones(len(p), dtype=complex)
        for axis, fac in enumerate(self.factors):
            out = out * fac.deriv(p[:, axis], multi.count(axis))
        return out

    def bounds(self, reach=None):
        ms = [f.bounds(reach) for f in self.factors]
        vals = _product_norms_1d(ms[0]) if len(ms) == 1 else _product_norms_2d(*ms)
        valid = min(f.valid for f in self.factors)
        if reach is not None and np.isfinite(valid):
            valid = float(reach)
        return SupNorms(*map(float, vals), value=float(np.prod([m[0] for m in ms])),
                        certified=True, valid=valid)


class PolynomialShape(ShapeFunction):
    """Phi(s, t) = sum C[i, j] s^i t^j (or a 1-D coefficient vector on intervals)."""

    def __init__(self, ident, domain, coeffs, description=""):
        super().__init__(ident, domain, description)
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if c.ndim != domain.dim:
            raise InvalidParameter("coefficient array rank must match the domain dimension")
        self.coeffs = c
        lo, hi = domain.bounds()
        self.valid = float(np.max(np.maximum(np.abs(lo), np.abs(hi)))) + CERT_MARGIN

    def _coeff_deriv(self, c, multi):
        for axis in multi:
            c = P.polyder(c, 1, axis=axis)
        return c

    def deriv(self, p, multi):
        c = self._coeff_deriv(self.coeffs, multi)
        if self.domain.dim == 1:
            return P.polyval(p[:, 0], c)
        return P.polyval2d(p[:, 0], p[:, 1], c)

    @staticmethod
    def _bound(c, r):
        powers = np.indices(c.shape).sum(axis=0)
        return float(np.sum(np.abs(c) * r ** powers))

    def _hess_bound(self, c, r):
        k = self.domain.dim
        ents = [self._bound(self._coeff_deriv(c, (i, j)), r) for i in range(k) for j in range(k)]
        return float(np.sqrt(np.sum(np.square(ents))))

    def _mul(self, a, b):
        if self.domain.dim == 1:
            return P.polymul(a, b)
        return convolve2d(a, b)

    def bounds(self, reach=None):
        r = self.valid if reach is None else float(reach)
        c = self.coeffs
        k = self.domain.dim
        grads = [self._coeff_deriv(c, (i,)) for i in range(k)]
        grad = float(np.sqrt(np.sum([self._bound(g, r) ** 2 for g in grads])))
        abs2 = self._mul(c, np.conj(c))
        grad2 = sum(self._mul(g, np.conj(g)) for g in grads) if k == 1 else None
        if k == 2:
            a, b = (self._mul(g, np.conj(g)) for g in grads)
            shape = np.maximum(a.shape, b.shape)
            grad2 = np.zeros(shape, dtype=complex)
            grad2[: a.shape[0], : a.shape[1]] += a
            grad2[: b.shape[0], : b.shape[1]] += b
        return SupNorms(grad, self._hess_bound(c, r), self._hess_bound(abs2, r),
                        self._hess_bound(grad2, r), value=self._bound(c, r), certified=True, valid=r)


class SampledShape(ShapeFunction):
    """User-supplied Phi; sup-norms estimated on a dense sample, hence uncertified."""

    def __init__(self, ident, domain, fn, grad=None, n_samples=201, step=1e-4):
        super().__init__(ident, domain, "user-supplied")
        self.fn = fn
        self.grad_fn = grad
        self.n_samples = n_samples
        self.step = step
        self._norms = None

    def deriv(self, p, multi):
        if not multi:
            return np.asarray(self.fn(p), dtype=complex)
        if len(multi) == 1 and self.grad_fn is not None:
            return np.asarray(self.grad_fn(p), dtype=complex)[:, multi[0]]
        head, last = multi[:-1], multi[-1]
        e = np.zeros(self.domain.dim)
        e[last] = self.step
        return (self.deriv(p + e, head) - self.deriv(p - e, head)) / (2 * self.step)

    def _sample(self):
        lo, hi = self.domain.bounds()
        axes = [np.linspace(lo[k], hi[k], self.n_samples if self.domain.dim == 1 else 61)
                for k in range(self.domain.dim)]
        pts = np.column_stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")])
        return pts[self.domain.contains(pts)]

    def bounds(self, reach=None):
        if self._norms is None:
            p = self._sample()
            vals = sampled_norms(self, p)
            top = float(np.max(np.abs(self.deriv(p, ()))))
            self._norms = SupNorms(*(SAMPLED_SAFETY * v for v in vals), value=SAMPLED_SAFETY * top,
                                   certified=False, valid=0.0)
        return self._norms


def sampled_norms(shape, p):
    """Sampled maxima of the four sup-norm quantities at points p (exact derivatives)."""
    k = shape.domain.dim
    phi = shape.deriv(p, ())
    d1 = [shape.deriv(p, (i,)) for i in range(k)]
    d2 = [[shape.deriv(p, (i, j)) for j in range(k)] for i in range(k)]
    d3 = [[[shape.deriv(p, (i, j, m)) for m in range(k)] for j in range(k)] for i in range(k)]
    grad = np.sqrt(sum(np.abs(g) ** 2 for g in d1))
    hess = np.array([[d2[i][j] for j in range(k)] for i in range(k)]).transpose(2, 0, 1)
    h_abs2 = np.array([[2 * np.real(d2[i][j] * np.conj(phi) + d1[i] * np.conj(d1[j]))
                        for j in range(k)] for i in range(k)]).transpose(2, 0, 1)
    h_grad2 = np.array([[sum(2 * np.real(d3[c][i][j] * np.conj(d1[c]) + d2[c][i] * np.conj(d2[c][j]))
                             for c in range(k)) for j in range(k)] for i in range(k)]).transpose(2, 0, 1)

    def opnorm(h):
        return float(np.max(np.linalg.norm(h, ord=2, axis=(1, 2)))) if len(h) else 0.0

    return (float(np.max(grad)) if len(grad) else 0.0, opnorm(hess), opnorm(h_abs2), opnorm(h_grad2))


# ---------------------------------------------------------------- registry

INTERVAL = Interval(1.0)
SQUARE = Square(1.0)
DISK = Disk(0.5)


def _mode(k):
    """sin(k pi (t + 1/2)): the k-th Dirichlet mode of [-1/2, 1/2]."""
    return Sinusoid(k * np.pi, 0.5 * k * np.pi)


def _cmode(k):
    """cos(k pi (t + 1/2)): the k-th Neumann mode of [-1/2, 1/2]."""
    return Sinusoid(k * np.pi, 0.5 * k * np.pi + 0.5 * np.pi)


def _bubble():
    return Poly1((0.25, 0.0, -1.0))


def _build_registry():
    I, S, D = INTERVAL, SQUARE, DISK
    reg = []

    def sep(ident, dom, *factors, desc=""):
        reg.append(SeparableShape(ident, dom, factors, desc))

    sep("I:const", I, Const(1.0), desc="1")
    for k in range(1, 9):
        sep(f"I:sin{k}", I, _mode(k), desc=f"sin({k} pi s)")
    for k in range(1, 5):
        sep(f"I:cos{k}", I, _cmode(k), desc=f"cos({k} pi s)")
    sep("I:linear", I, Poly1((0.0, 1.0)), desc="t")
    sep("I:quadratic", I, Poly1((0.0, 0.0, 1.0)), desc="t^2")
    sep("I:bubble", I, _bubble(), desc="1/4 - t^2")
    sep("I:bubble2", I, Poly1((1 / 16, 0.0, -0.5, 0.0, 1.0)), desc="(1/4 - t^2)^2")
    sep("I:cubic", I, Poly1((0.0, -0.25, 0.0, 1.0)), desc="t^3 - t/4")
    for n, (c, w) in enumerate([(0.0, 0.15), (0.2, 0.1), (-0.25, 0.2), (0.1, 0.3)], 1):
        sep(f"I:gauss{n}", I, Gaussian(c, w), desc=f"gaussian({c}, {w})")
    sep("I:sin1_gauss", I, _mode(1) * Gaussian(0.0, 0.3))
    sep("I:sin2_gauss", I, _mode(2) * Gaussian(0.1, 0.25))
    sep("I:bubble_cos", I, _bubble() * Sinusoid(np.pi, 0.5 * np.pi))
    sep("I:wave1_sin1", I, PlaneWave(1.0) * _mode(1))
    sep("I:wave3_sin1", I, PlaneWave(3.0) * _mode(1))
    sep("I:wave2pi", I, PlaneWave(2 * np.pi))
    sep("I:const_plus_sin1", I, Const(1.0) + scaled(0.3, _mode(1)))
    sep("I:sin1_plus_sin3", I, _mode(1) + scaled(0.5, _mode(3)))

    sep("S:const", S, Const(1.0), Const(1.0))
    for m, n in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 2)]:
        sep(f"S:sin{m}xsin{n}", S, _mode(m), _mode(n))
    sep("S:cos1xcos1", S, _cmode(1), _cmode(1))
    sep("S:cos1x1", S, _cmode(1), Const(1.0))
    sep("S:gaussxgauss", S, Gaussian(0.0, 0.2), Gaussian(0.0, 0.2))
    sep("S:gaussxgauss_off", S, Gaussian(0.1, 0.15), Gaussian(-0.1, 0.25))
    sep("S:bubblexbubble", S, _bubble(), _bubble())
    sep("S:wave_sin1xsin1", S, PlaneWave(2.0) * _mode(1), _mode(1))

    r2 = np.zeros((3, 3))
    r2[0, 0], r2[2, 0], r2[0, 2] = 1.0, -4.0, -4.0  # 1 - 4 r^2 vanishes on the disk of radius 1/2

    def poly(ident, c, desc=""):
        reg.append(PolynomialShape(ident, D, c, desc))

    poly("D:const", np.ones((1, 1)), "1")
    poly("D:bubble", r2, "1 - 4 r^2")
    poly("D:bubble2", convolve2d(r2, r2), "(1 - 4 r^2)^2")
    poly("D:s_bubble", convolve2d(r2, np.array([[0.0], [1.0]])), "s (1 - 4 r^2)")
    poly("D:t_bubble", convolve2d(r2, np.array([[0.0, 1.0]])), "t (1 - 4 r^2)")
    quad = np.zeros((3, 3))
    quad[2, 0], quad[0, 2] = 1.0, -1.0
    poly("D:saddle_bubble", convolve2d(r2, quad), "(s^2 - t^2)(1 - 4 r^2)")
    mixed = np.zeros((2, 3), dtype=complex)
    mixed[1, 0], mixed[0, 2] = 1.0, 0.5j
    poly("D:mixed", mixed, "s + i t^2 / 2")
    return reg


REGISTRY = _build_registry()
_BY_ID = {s.id: s for s in REGISTRY}

# registry entry standing in for the first Dirichlet mode on each domain
FIRST_MODE = {"interval": "I:sin1", "rectangle": "S:sin1xsin1", "disk": "D:bubble"}


def get_shape(ident):
    try:
        return _BY_ID[ident]
    except KeyError:
        raise InvalidParameter(f"unknown shape function {ident!r}") from None


def registry_for(domain):
    """Registry entries defined on a domain of the same kind as ``domain``."""
    return [s for s in REGISTRY if type(s.domain) is type(domain)]


def first_mode(domain):
    return get_shape(FIRST_MODE[domain.name])
