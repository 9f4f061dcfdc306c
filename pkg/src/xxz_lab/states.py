"""Couplings, single-site vectors and the bond projector of the kink model.

Amplitudes are evaluated in a form that cannot overflow: with t = alpha (l - mu),

    e^{ t/2} / sqrt(2 cosh t) = 1 / sqrt(1 + e^{-2t}),

and the phase from Im z is applied separately.  Basis order is (up, down) on
one site and (up-up, up-down, down-up, down-down) on a bond, the lower site
first.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameter


def log_cosh(t):
    t = np.abs(np.asarray(t, dtype=float))
    return t + np.log1p(np.exp(-2.0 * t)) - np.log(2.0)


def sech(t):
    return np.exp(-log_cosh(t))


@dataclass(frozen=True)
class AnisotropyParams:
    delta: float
    alpha: float
    a_field: float

    @property
    def sech_alpha(self):
        return 1.0 / self.delta

    @property
    def exp_minus_alpha(self):
        """e^{-alpha} = Delta - sqrt(Delta^2 - 1), in cancellation-free form."""
        return 1.0 / (self.delta + np.sqrt(self.delta ** 2 - 1.0))

    @property
    def degenerate(self):
        return self.delta == 1.0


def make_aniso(delta, degenerate=False):
    """Anisotropy Delta = cosh(alpha) with boundary field A = sqrt(1 - 1/Delta^2)/2.

    Delta = 1 is only accepted with ``degenerate=True``.
    """
    delta = float(delta)
    if not np.isfinite(delta) or delta < 1.0:
        raise InvalidParameter(f"anisotropy must satisfy Delta >= 1, got {delta}")
    if delta == 1.0 and not degenerate:
        raise InvalidParameter("Delta = 1 is the isotropic point; pass degenerate=True to allow it")
    alpha = float(np.arccosh(delta))
    a_field = 0.5 * np.sqrt(1.0 - 1.0 / delta ** 2)
    return AnisotropyParams(delta, alpha, float(a_field))


@dataclass(frozen=True)
class InterfaceSpec:
    z: complex = 0j

    @property
    def mu(self):
        return complex(self.z).real

    @property
    def nu(self):
        return complex(self.z).imag


def interface(z=0.0):
    return InterfaceSpec(complex(z))


@dataclass(frozen=True)
class SiteVector:
    up_amp: complex
    down_amp: complex

    def as_array(self):
        return np.array([self.up_amp, self.down_amp], dtype=complex)


def _magnitudes(levels, spec, a):
    t = a.alpha * (np.asarray(levels, dtype=float) - spec.mu)
    up = np.exp(-0.5 * np.logaddexp(0.0, -2.0 * t))
    down = np.exp(-0.5 * np.logaddexp(0.0, 2.0 * t))
    return up, down


def v_amplitudes(levels, spec, a):
    """(up, down) amplitudes of v_x(z) for an array of site levels."""
    up, down = _magnitudes(levels, spec, a)
    ph = np.exp(-0.5j * a.alpha * spec.nu)
    return up * ph, down * np.conj(ph)


def w_amplitudes(levels, spec, a):
    """(up, down) amplitudes of w_x, the unit vector orthogonal to v_x."""
    up, down = _magnitudes(levels, spec, a)
    ph = np.exp(-0.5j * a.alpha * spec.nu)
    return down * ph, -up * np.conj(ph)


def _site_level(x):
    x = np.asarray(x)
    return float(x.sum()) if x.ndim else float(x)


def site_vector_v(x, spec, a):
    """v_x(z) for a site given by its coordinates (or directly by its level)."""
    up, down = v_amplitudes(_site_level(x), spec, a)
    return SiteVector(complex(up), complex(down))


def site_vector_w(x, spec, a):
    up, down = w_amplitudes(_site_level(x), spec, a)
    return SiteVector(complex(up), complex(down))


def xi_vector(a):
    """xi = (e^{-alpha/2}|down up> - e^{alpha/2}|up down>) / sqrt(2 cosh alpha)."""
    # e^{+-alpha/2} / sqrt(2 cosh alpha) = 1 / sqrt(1 + e^{-+2 alpha})
    big = np.exp(-0.5 * np.logaddexp(0.0, -2.0 * a.alpha))
    small = np.exp(-0.5 * np.logaddexp(0.0, 2.0 * a.alpha))
    return np.array([0.0, -big, small, 0.0], dtype=complex)


def bond_projector(a):
    """|xi><xi| as a 4x4 matrix."""
    xi = xi_vector(a)
    return np.outer(xi, xi.conj())


def xi_in_vw_basis(level_lower, spec, a):
    """Coefficients of xi on (v v, w v, v w, w w) for a bond starting at ``level_lower``.

    The upper site sits one level higher.  All four numbers are real.
    """
    lx = log_cosh(a.alpha * (level_lower - spec.mu))
    ly = log_cosh(a.alpha * (level_lower + 1 - spec.mu))
    norm = np.sqrt(2.0 * a.delta)
    wv = -np.exp(0.5 * (lx - ly)) / norm
    vw = np.exp(0.5 * (ly - lx)) / norm
    ww = np.sinh(a.alpha) * np.exp(-0.5 * (lx + ly)) / norm
    return np.array([0.0, wv, vw, ww])
