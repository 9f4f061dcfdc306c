import math

import numpy as np
import pytest

from xxz_lab.domains import Interval
from xxz_lab.error_bounds import (ErrorBudget, certified_normalized_energy_interval,
                                  epsilon_budget, error_report_row, lemma_checks,
                                  riemann_error_bound, voronoi_moment)
from xxz_lab.exceptions import CertificationError, InvalidParameter
from xxz_lab.lattice import make_cylinder
from xxz_lab.shapes import REGISTRY, get_shape
from xxz_lab.states import interface, make_aniso

A2 = make_aniso(2.0)
MU0 = interface(0.0)


def test_chain_cell():
    vd = voronoi_moment(2)
    assert vd.half_second_moment == pytest.approx(1 / 12, abs=1e-15)
    assert vd.nearest_neighbor_distance == pytest.approx(math.sqrt(2))
    assert vd.cell_volume == pytest.approx(math.sqrt(2))


def test_hexagon_moment_against_monte_carlo():
    vd = voronoi_moment(3)
    rng = np.random.default_rng(2024)
    n = 10_000_000
    r = vd.circumradius
    p = rng.uniform(-r, r, size=(n, 2))
    # a point is in the Voronoi cell iff it is nearer the origin than any of the six neighbours
    nbrs = np.array([[math.cos(t), math.sin(t)] for t in np.arange(6) * math.pi / 3])
    nbrs = nbrs * vd.nearest_neighbor_distance
    ang = math.atan2(vd.vertices[0][1], vd.vertices[0][0]) - math.pi / 6
    rot = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
    nbrs = nbrs @ rot.T
    inside = np.all(p @ nbrs.T <= 0.5 * vd.nearest_neighbor_distance ** 2, axis=1)
    q = p[inside]
    mc = 0.5 * np.mean(np.sum(q * q, axis=1))
    assert mc == pytest.approx(vd.half_second_moment, abs=1e-4)
    assert vd.half_second_moment == pytest.approx(5 / 36, abs=1e-15)
    assert inside.mean() * (2 * r) ** 2 == pytest.approx(vd.cell_volume, rel=1e-3)


def test_quadratic_bound_example():
    assert riemann_error_bound(2.0, voronoi_moment(2), 10) == pytest.approx(1 / 600, rel=1e-14)


def test_linear_shape_has_zero_bound():
    assert riemann_error_bound(0.0, voronoi_moment(2), 5) == 0.0


def test_linear_average_exact_on_symmetric_base():
    cyl = make_cylinder(Interval(1.0), 7, 2, 0)
    t = cyl.perp()[:, 0] / 7
    assert abs(t.mean()) < 1e-15  # continuum average of t over [-1/2, 1/2] is 0


def test_constant_shape_budget_vanishes():
    assert epsilon_budget(get_shape("S:const"), 8, 3) == ErrorBudget(0.0, 0.0, 0.0)


def test_constant_shape_interval_is_zero():
    iv = certified_normalized_energy_interval(get_shape("I:const"), 8, 4, MU0, A2)
    assert iv.lower == 0.0 and iv.upper <= 1e-20


def test_budget_formulas():
    phi = get_shape("I:sin1")
    sn = phi.sup_norms
    b = epsilon_budget(sn, 10, 2)
    assert b.eps1 == pytest.approx(sn.hess_abs2 / 100)
    assert b.eps2 == pytest.approx(0.2 * (sn.grad + sn.hess / 40) * sn.hess)
    assert b.eps3 == pytest.approx(sn.hess_grad2 / 100)


def test_budget_shrinks_with_R():
    phi = get_shape("D:bubble")
    e8, e32 = epsilon_budget(phi, 8, 3), epsilon_budget(phi, 32, 3)
    assert e32.eps1 == pytest.approx(e8.eps1 / 16) and e32.eps2 < e8.eps2 / 3.9


def test_bad_inputs():
    with pytest.raises(InvalidParameter):
        riemann_error_bound(float("inf"), voronoi_moment(2), 4)
    with pytest.raises(InvalidParameter):
        voronoi_moment(4)


def test_strict_mode_refuses_small_R():
    with pytest.raises(CertificationError):
        certified_normalized_energy_interval(get_shape("I:sin8"), 4, 4, MU0, A2)
    iv = certified_normalized_energy_interval(get_shape("I:sin8"), 4, 4, MU0, A2, strict=False)
    assert iv.upper == math.inf and not iv.certified


@pytest.mark.parametrize("ident", ["I:sin1", "I:gauss2", "S:sin1xsin1", "S:cos1x1", "D:bubble"])
def test_lemma_holds_per_level(ident):
    phi = get_shape(ident)
    cyl = make_cylinder(phi.domain, 16, phi.domain.dim + 1, 2)
    checks = lemma_checks(phi, cyl)
    assert checks and all(c.within for c in checks)


@pytest.mark.parametrize("ident,R", [("I:sin1", 64), ("S:sin1xsin1", 32), ("D:bubble", 48)])
def test_interval_is_finite_and_contains_exact_at_moderate_R(ident, R):
    row = error_report_row(get_shape(ident), R, 10, MU0, A2)
    assert row["contained"] and math.isfinite(row["interval_hi"])
    assert row["interval_hi"] < 5 * row["exact_rayleigh"]


def test_interval_narrows_with_R():
    phi = get_shape("I:sin1")
    w = []
    for R in (64, 128, 256):
        iv = certified_normalized_energy_interval(phi, R, 10, MU0, A2)
        w.append((iv.upper - iv.lower) * R * R)
    assert w[2] < w[1] < w[0]


def test_report_row_fields_are_deterministic():
    a = error_report_row(get_shape("I:cos1"), 16, 10, MU0, A2)
    b = error_report_row(get_shape("I:cos1"), 16, 10, MU0, A2)
    assert a == b
