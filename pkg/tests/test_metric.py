from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from torusgreen.errors import (
    FitFailure,
    NoNontrivialSolution,
    PoleProximity,
    StencilSingularity,
    TrivialSolution,
)
from torusgreen.lattice import lattice_from_tau
from torusgreen.metric import (
    MetricSolution,
    cone_angle,
    cone_exponent,
    f_second_kind,
    metric_u,
    multipliers,
    multipliers_at,
    pde_residual,
    u_grid,
)


@pytest.fixture(scope="module")
def sol():
    return MetricSolution.from_tau(0.5 + 1.2j)


@pytest.fixture(scope="module")
def skew():
    return MetricSolution.from_tau(0.3 + 0.8j, c=0.7 - 0.4j)


def winding(f, path: np.ndarray) -> float:
    v = f(path)
    return float(np.sum(np.angle(np.roll(v, -1) / v)) / (2 * math.pi))


# -- construction -------------------------------------------------------


def test_from_tau_picks_a_nontrivial_solution(sol):
    L = sol.lattice
    assert all(abs(sol.a - w) > 1e-3 for w in L.half_periods)
    # for Re tau = 1/2 the pair sits on the symmetry line Re a = 1/2
    assert sol.a.real == pytest.approx(0.5, abs=1e-12)
    assert sol.a.imag == pytest.approx(0.5419476178153356, abs=1e-10)


def test_rejections():
    L = lattice_from_tau(0.5 + 1.2j)
    with pytest.raises(TrivialSolution):
        MetricSolution(a=0.5, c=1.0, lattice=L)
    with pytest.raises(ValueError, match="does not solve"):
        MetricSolution(a=0.2 + 0.2j, c=1.0, lattice=L)
    a = MetricSolution.from_tau(0.5 + 1.2j).a
    with pytest.raises(ValueError):
        MetricSolution(a=a, c=0.0, lattice=L)
    with pytest.raises(NoNontrivialSolution) as exc:
        MetricSolution.from_tau(1j)
    assert exc.value.to_dict()["error"] == "no_nontrivial_solution"


# -- multipliers ------------------------------------------------------


@pytest.mark.parametrize("tau", [0.5 + 1.2j, 0.3 + 0.8j, -0.4 + 0.9j, 0.35 + 0.95j])
def test_multipliers_are_unimodular(tau):
    s = MetricSolution.from_tau(tau)
    for lam in multipliers(s):
        assert abs(abs(lam) - 1) < 1e-8


def test_generic_point_gives_non_unimodular_multipliers():
    lam = multipliers_at(0.2 + 0.2j, lattice_from_tau(0.5 + 1.2j))
    assert max(abs(abs(x) - 1) for x in lam) > 0.1


def test_multipliers_do_not_depend_on_c(sol):
    other = MetricSolution(a=sol.a, c=3.0 + 2.0j, lattice=sol.lattice)
    assert multipliers(other) == multipliers(sol)


@pytest.mark.parametrize("z1, z2", [(0.31 + 0.17j, 0.05 + 0.6j), (0.7 + 0.2j, -0.4 + 1.1j)])
def test_f_multiplies_by_lambda(skew, z1, z2):
    lam1, lam2 = multipliers(skew)
    tau = skew.lattice.tau
    for z in (z1, z2):
        assert abs(complex(f_second_kind(z + 1, skew)) / complex(f_second_kind(z, skew)) - lam1) < 1e-10
        assert abs(complex(f_second_kind(z + tau, skew)) / complex(f_second_kind(z, skew)) - lam2) < 1e-10


# -- the developing map ------------------------------------------------


def test_simple_zero_at_a(skew):
    a = skew.a
    assert abs(complex(f_second_kind(a, skew))) < 1e-14
    h = 1e-5
    d = (complex(f_second_kind(a + h, skew)) - complex(f_second_kind(a - h, skew))) / (2 * h)
    assert abs(d) > 1e-3
    with pytest.raises(PoleProximity):
        f_second_kind(-a + 1e-6, skew)


def test_double_critical_point_at_origin(skew):
    def f(z):
        return complex(f_second_kind(z, skew))

    def d1(h):
        return (f(h) - f(-h)) / (2 * h)

    def d2(h):
        return (f(h) - 2 * f(0) + f(-h)) / h**2

    def d3(h):
        return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h**3)

    h = 1e-4
    f1 = (4 * d1(h / 2) - d1(h)) / 3
    f2 = (4 * d2(h / 2) - d2(h)) / 3
    f3 = (4 * d3(h / 2) - d3(h)) / 3
    assert abs(f3) > 1e-2
    assert abs(f1) < 1e-8 * max(1.0, abs(f3))
    assert abs(f2) < 1e-6 * max(1.0, abs(f3))


def test_one_zero_and_one_pole_per_cell(skew):
    tau = skew.lattice.tau
    # parallelogram with corner p0, chosen so that no zero or pole lies on it
    p0 = -0.137 - 0.211 * tau
    t = np.linspace(0, 1, 4000, endpoint=False)
    edge = np.concatenate([p0 + t, p0 + 1 + t * tau, p0 + 1 + tau - t, p0 + tau - t * tau])

    def f(z):
        return f_second_kind(z, skew)

    assert winding(f, edge) == pytest.approx(0.0, abs=1e-9)
    circle = 1e-2 * np.exp(2j * math.pi * t)
    assert winding(f, skew.a + circle) == pytest.approx(1.0, abs=1e-9)
    assert winding(f, -skew.a + 0.05 + circle) == pytest.approx(0.0, abs=1e-9)
    assert winding(f, -skew.a + circle) == pytest.approx(-1.0, abs=1e-9)


# -- the density u --------------------------------------------------------


@pytest.mark.parametrize("z", [0.31 + 0.17j, 0.8 + 0.9j, -0.2 + 0.05j])
def test_u_is_doubly_periodic(skew, z):
    tau = skew.lattice.tau
    u = float(metric_u(z, skew))
    assert abs(float(metric_u(z + 1, skew)) - u) < 1e-9
    assert abs(float(metric_u(z + tau, skew)) - u) < 1e-9
    assert abs(float(metric_u(z - 2 + 3 * tau, skew)) - u) < 1e-9


def test_u_invariant_under_rotating_c(sol):
    z = np.array([0.31 + 0.17j, 0.6 + 0.7j])
    rot = MetricSolution(a=sol.a, c=sol.c * cmath.exp(0.9j), lattice=sol.lattice)
    assert np.allclose(metric_u(z, rot), metric_u(z, sol), rtol=0, atol=1e-12)


def test_modulus_of_c_gives_distinct_members(sol):
    z = np.array([0.31 + 0.17j, 0.6 + 0.7j, 0.1 + 1.0j])
    us = []
    for c in (0.5, 1.0, 2.0):
        s = MetricSolution(a=sol.a, c=c, lattice=sol.lattice)
        us.append(metric_u(z, s))
        assert abs(float(metric_u(z[0] + 1, s)) - float(us[-1][0])) < 1e-9
        assert abs(pde_residual(0.3 + 0.3j, 1e-3, s)) < 1e-3
    assert np.min(np.abs(us[0] - us[1])) > 1e-3
    assert np.min(np.abs(us[1] - us[2])) > 1e-3


def test_u_is_smooth_across_the_pole_of_f(skew):
    p = -skew.a
    ring = p + 1e-5 * np.exp(2j * math.pi * np.arange(8) / 8)
    near = metric_u(ring, skew)
    at = float(metric_u(p, skew))
    assert np.isfinite(at) and np.all(np.isfinite(near))
    assert np.max(np.abs(near - at)) < 1e-3
    assert abs(np.mean(near) - at) < 1e-8
    # and across the zero of f
    ring = skew.a + 1e-5 * np.exp(2j * math.pi * np.arange(8) / 8)
    assert abs(np.mean(metric_u(ring, skew)) - float(metric_u(skew.a, skew))) < 1e-8


def test_u_singular_at_lattice(sol):
    with pytest.raises(PoleProximity):
        metric_u(1 + sol.lattice.tau, sol)


# -- the PDE ------------------------------------------------------------


def test_pde_residual_small(sol):
    assert abs(pde_residual(0.3 + 0.3j, 1e-3, sol)) < 1e-3


@pytest.mark.parametrize("z", [0.3 + 0.3j, 0.55 + 0.8j, 0.2 + 0.9j])
def test_pde_residual_is_second_order(skew, z):
    r1 = pde_residual(z, 2e-3, skew)
    r2 = pde_residual(z, 1e-3, skew)
    assert r1 / r2 == pytest.approx(4.0, rel=0.2)


def test_pde_residual_periodic(skew):
    z = 0.3 + 0.3j
    r = pde_residual(z, 1e-3, skew)
    assert pde_residual(z + 1, 1e-3, skew) == pytest.approx(r, abs=1e-7)
    assert pde_residual(z + skew.lattice.tau, 1e-3, skew) == pytest.approx(r, abs=1e-7)


def test_pde_residual_at_interior_points(skew):
    tau = skew.lattice.tau
    k = (np.arange(5) + 0.5) / 5
    for s in k:
        for t in k:
            z = s + t * tau
            r1 = pde_residual(z, 2e-3, skew)
            r2 = pde_residual(z, 1e-3, skew)
            # pure h^2 truncation: the ratio is 4 and the extrapolated
            # residual is small even next to the cone point
            assert r1 / r2 == pytest.approx(4.0, rel=0.2)
            assert abs(4 * r2 - r1) / 3 < 1e-5


def test_stencil_guard(sol):
    with pytest.raises(StencilSingularity):
        pde_residual(5e-3, 1e-3, sol)


# -- the cone point -------------------------------------------------------


def test_cone_exponent_and_angle(sol):
    # f' has a double zero at 0, so exp(u) ~ |z|^4 and the total angle is 6 pi
    assert cone_exponent(sol, np.logspace(-2, -4, 9)) == pytest.approx(4.0, abs=1e-3)
    assert cone_angle(sol) == pytest.approx(6 * math.pi, rel=1e-3)


def test_cone_angle_independent_of_c(sol):
    ref = cone_angle(sol)
    for c in (cmath.exp(1.3j), 2.0):
        s = MetricSolution(a=sol.a, c=c, lattice=sol.lattice)
        assert cone_angle(s) == pytest.approx(ref, rel=1e-9)


def test_cone_fit_needs_a_decade(sol):
    with pytest.raises(FitFailure):
        cone_angle(sol, radii=[1e-2, 5e-3, 2e-3])
    with pytest.raises(FitFailure):
        cone_angle(sol, radii=[1e-3, 1e-7])


def test_u_grid(sol):
    x, y, z, u = u_grid(sol, nx=8, ny=6)
    assert u.shape == (6, 8) and np.all(np.isfinite(u))
    assert z[0, 0] == pytest.approx(1 / 16 + sol.lattice.tau / 12)
