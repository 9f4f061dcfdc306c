import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxz_lab.exceptions import InvalidParameter
from xxz_lab.states import (bond_projector, interface, make_aniso, v_amplitudes, w_amplitudes,
                            xi_in_vw_basis, xi_vector)


def test_delta_two():
    a = make_aniso(2.0)
    assert a.alpha == pytest.approx(1.316957896924816, abs=1e-12)
    assert a.sech_alpha == pytest.approx(0.5, abs=1e-15)


def test_degenerate_mode():
    a = make_aniso(1.0, degenerate=True)
    assert a.alpha == 0 and a.a_field == 0
    with pytest.raises(InvalidParameter):
        make_aniso(1.0)


def test_field_at_five_quarters():
    assert make_aniso(1.25).a_field == pytest.approx(0.3, abs=1e-15)


@pytest.mark.parametrize("bad", [0.5, -2.0, float("nan"), float("inf")])
def test_bad_delta(bad):
    with pytest.raises(InvalidParameter):
        make_aniso(bad)


def test_symmetric_point_amplitudes():
    a = make_aniso(2.0)
    up, down = v_amplitudes([0.0], interface(0.0), a)
    assert np.allclose([up[0], down[0]], [2 ** -0.5, 2 ** -0.5])
    up, down = w_amplitudes([0.0], interface(0.0), a)
    assert np.allclose([up[0], down[0]], [2 ** -0.5, -2 ** -0.5])


def test_far_level_amplitudes_do_not_overflow():
    a = make_aniso(2.0)
    l = 40 / a.alpha
    up, down = v_amplitudes([l], interface(0.0), a)
    assert abs(up[0]) == pytest.approx(1.0, abs=1e-15)
    # independent evaluation: down/up = e^{-t} with t = alpha (l - mu) = 40
    assert abs(down[0]) == pytest.approx(np.exp(-40.0), rel=1e-12)
    assert abs(up[0]) ** 2 + abs(down[0]) ** 2 == pytest.approx(1.0, abs=1e-12)


@given(st.floats(1.01, 20), st.floats(-30, 30), st.floats(-5, 5), st.floats(-5, 5))
def test_v_and_w_orthonormal(delta, l, mu, nu):
    a, spec = make_aniso(delta), interface(complex(mu, nu))
    v = np.array(v_amplitudes([l], spec, a))[:, 0]
    w = np.array(w_amplitudes([l], spec, a))[:, 0]
    assert np.linalg.norm(v) == pytest.approx(1, abs=1e-12)
    assert np.linalg.norm(w) == pytest.approx(1, abs=1e-12)
    assert abs(np.vdot(v, w)) < 1e-12


def test_xi_at_delta_two():
    a = make_aniso(2.0)
    expected = np.array([0, -np.exp(a.alpha / 2), np.exp(-a.alpha / 2), 0]) / 2
    assert np.allclose(xi_vector(a), expected, atol=1e-15)


@given(st.floats(1.001, 50))
def test_projector_is_rank_one_orthogonal(delta):
    P = bond_projector(make_aniso(delta))
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.trace(P).real == pytest.approx(1, abs=1e-12)
    assert np.allclose(P, P.conj().T)


@given(st.floats(1.01, 10), st.integers(-5, 5), st.floats(-4, 4))
def test_xi_decomposes_in_vw_basis(delta, lx, mu):
    a, spec = make_aniso(delta), interface(mu)
    coeffs = xi_in_vw_basis(lx, spec, a)
    vx = np.array(v_amplitudes([lx], spec, a))[:, 0]
    wx = np.array(w_amplitudes([lx], spec, a))[:, 0]
    vy = np.array(v_amplitudes([lx + 1], spec, a))[:, 0]
    wy = np.array(w_amplitudes([lx + 1], spec, a))[:, 0]
    basis = [np.kron(vx, vy), np.kron(wx, vy), np.kron(vx, wy), np.kron(wx, wy)]
    xi = xi_vector(a)
    for vec, c in zip(basis, coeffs):
        assert np.vdot(vec, xi) == pytest.approx(c, abs=1e-12)


def test_symmetric_bond_has_equal_mixed_coefficients():
    a = make_aniso(3.0)
    c = xi_in_vw_basis(0, interface(0.5), a)
    assert abs(c[1]) == pytest.approx(abs(c[2]), rel=1e-12)
