import math

import numpy as np
import pytest
from scipy import integrate, optimize, special, stats

from expectiles.distributions import (
    ConvergenceError,
    DiscreteDistribution,
    StudentT,
    discrete_breakpoints,
    discrete_expectile,
    expectile_derivative,
    model_from_json,
    population_identification,
    solve_expectile,
    t_tail_constant,
    t_upper_partial,
)
from expectiles.empirical import build_sample, expectile

THREE = DiscreteDistribution([0, 1, 2], [0.4, 0.5, 0.1])
GRID = np.round(np.arange(0.1, 0.91, 0.1), 10)


def t_density(alpha):
    c = math.exp(special.gammaln((alpha + 1) / 2) - special.gammaln(alpha / 2)) / math.sqrt(alpha * math.pi)
    return lambda y: c * (1 + y * y / alpha) ** (-(alpha + 1) / 2)


def quad_upper_partial(alpha, x):
    f = t_density(alpha)
    v, _ = integrate.quad(lambda y: (y - x) * f(y), x, np.inf, epsabs=1e-14, epsrel=1e-13, limit=500)
    return v


def quad_expectile(alpha, tau):
    """Root of the first-order condition with the partial moment from quadrature."""
    def g(x):
        u = quad_upper_partial(alpha, x)
        return tau * u - (1 - tau) * (u + x)
    return optimize.brentq(g, -50, 50, xtol=1e-14, rtol=1e-15)


# --------------------------------------------------------------------- models

def test_discrete_validation():
    with pytest.raises(ValueError):
        DiscreteDistribution([0, 0, 1], [0.2, 0.3, 0.5])
    with pytest.raises(ValueError):
        DiscreteDistribution([0, 1], [0.5, 0.6])
    with pytest.raises(ValueError):
        DiscreteDistribution([0, 1], [1.0, 0.0])
    with pytest.raises(ValueError):
        DiscreteDistribution([], [])


def test_discrete_cdf_and_atoms():
    d = THREE
    assert d.cdf(1) == pytest.approx(0.9)
    assert d.cdf_left(1) == pytest.approx(0.4)
    assert d.point_mass(1) == 0.5
    assert d.point_mass(0.5) == 0.0
    assert d.cdf(-1) == 0.0 and d.cdf(2) == pytest.approx(1.0)
    assert d.mean == pytest.approx(0.7)
    assert d.variance == pytest.approx(0.41)
    xs = np.linspace(-1, 3, 41)
    np.testing.assert_allclose(d.cdf_left(xs), d.cdf(xs) - d.point_mass(xs), atol=1e-15)


def test_student_t_basics():
    with pytest.raises(ValueError):
        StudentT(1.0)
    t = StudentT(1.5)
    xs = np.linspace(-30, 30, 61)
    np.testing.assert_allclose(t.cdf(xs), stats.t(1.5).cdf(xs), atol=1e-13)
    np.testing.assert_allclose(t.pdf(xs), stats.t(1.5).pdf(xs), rtol=1e-12)
    assert not t.has_finite_variance
    assert StudentT(4).variance == 2.0


@pytest.mark.parametrize("m", [THREE, StudentT(1.5), StudentT(3)])
def test_upper_partial_properties(m):
    xs = np.linspace(-10, 10, 201)
    u = np.asarray(m.upper_partial(xs))
    assert np.all(np.diff(u) <= 1e-15)
    assert np.all(np.diff(u, 2) >= -1e-12)
    assert np.all(u >= m.mean - xs - 1e-12)


def test_model_json():
    assert isinstance(model_from_json({"t": 1.5}), StudentT)
    d = model_from_json({"support": [0, 1, 2], "probs": [0.4, 0.5, 0.1]})
    assert d.to_json() == {"support": [0.0, 1.0, 2.0], "probs": [0.4, 0.5, 0.1]}
    with pytest.raises(ValueError):
        model_from_json({"normal": 1})
    with pytest.raises(ValueError):
        model_from_json({"t": 0.5})


# ---------------------------------------------------------- discrete formulas

def test_three_point_breakpoints():
    t = discrete_breakpoints(THREE)
    p0, p2 = 0.4, 0.1
    assert t.taus[0] == 0.0 and t.taus[-1] == 1.0
    assert abs(t.taus[1] - p0 / (p0 + p2)) <= 1e-14


def test_symmetric_two_point():
    d = DiscreteDistribution([-1, 1], [0.5, 0.5])
    assert discrete_breakpoints(d).taus.tolist() == [0.0, 1.0]
    assert discrete_expectile(d, 0.5) == 0.0


def test_uniform_three_point():
    d = DiscreteDistribution([0, 1, 2], [1 / 3, 1 / 3, 1 / 3])
    assert discrete_breakpoints(d).taus[1] == pytest.approx(0.5, abs=1e-15)


def test_single_atom():
    d = DiscreteDistribution([3.0], [1.0])
    assert discrete_breakpoints(d).taus.tolist() == [0.0, 1.0]
    assert discrete_expectile(d, 0.9) == 3.0


def test_three_point_expectiles():
    assert discrete_expectile(THREE, 0.7) == pytest.approx(49 / 54, abs=1e-14)
    assert discrete_expectile(THREE, 0.8) == 1.0
    assert discrete_expectile(THREE, 0.5) == pytest.approx(THREE.mean, abs=1e-15)


def test_three_point_closed_form():
    """Piecewise formula for a three-point law on {0, 1, 2}."""
    p0, p1, p2 = 0.4, 0.5, 0.1
    t1 = p0 / (p0 + p2)
    for tau in np.linspace(0.01, 0.99, 99):
        if tau < t1:
            ref = tau * (p1 + 2 * p2) / ((1 - tau) * p0 + tau * (p1 + p2))
        else:
            ref = ((1 - tau) * p1 + 2 * tau * p2) / ((1 - tau) * (p0 + p1) + tau * p2)
        assert discrete_expectile(THREE, tau) == pytest.approx(ref, abs=1e-14)


def test_discrete_domain():
    with pytest.raises(ValueError):
        discrete_expectile(THREE, 1.0)


def test_discrete_matches_solver():
    rng = np.random.default_rng(4)
    for _ in range(20):
        k = int(rng.integers(2, 8))
        atoms = np.sort(rng.choice(np.arange(-20, 20), size=k, replace=False)) * rng.uniform(0.1, 3)
        p = rng.dirichlet(np.ones(k))
        p[-1] = 1 - p[:-1].sum()
        d = DiscreteDistribution(atoms, p)
        for tau in np.linspace(0.02, 0.98, 25):
            assert abs(discrete_expectile(d, tau) - solve_expectile(d, tau)) <= 1e-10
            assert abs(population_identification(d, discrete_expectile(d, tau), tau)) <= 1e-12


def test_empirical_theoretical_coherence():
    s = build_sample([0] * 4 + [1] * 5 + [2])
    grid = np.linspace(0.01, 0.99, 197)
    np.testing.assert_allclose(expectile(s, grid), discrete_expectile(THREE, grid), rtol=0, atol=1e-15)
    d = DiscreteDistribution([-2.0, 0.5, 3.0, 10.0], [0.25, 0.25, 0.375, 0.125])
    s = build_sample([-2.0] * 2 + [0.5] * 2 + [3.0] * 3 + [10.0])
    np.testing.assert_allclose(expectile(s, grid), discrete_expectile(d, grid), rtol=1e-15, atol=1e-15)


# ------------------------------------------------------------------- Student t

@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8, 3.0, 10.0])
def test_t_upper_partial_quadrature(alpha):
    for x in (-7.0, -1.3, 0.0, 0.4, 2.5, 12.0):
        assert t_upper_partial(alpha, x) == pytest.approx(quad_upper_partial(alpha, x), abs=1e-10)


def test_t_upper_partial_identities():
    assert t_upper_partial(1.5, 1e8) < 1e-3
    assert t_upper_partial(1.5, 0.0) == pytest.approx(quad_upper_partial(1.5, 0.0), abs=1e-10)
    for x in (0.3, 1.7, 5.0):
        # U(x) - U(-x) under symmetry: E[(Y-x)+] - E[(x-Y)+] = -x
        assert t_upper_partial(2.5, x) - t_upper_partial(2.5, -x) == pytest.approx(-x, abs=1e-12)
    with pytest.raises(ValueError):
        t_upper_partial(1.0, 0.0)


def test_tail_constant():
    alpha = 1.5
    ref = math.gamma(1.25) / math.gamma(0.75) * 1.5 ** (-0.25) / math.sqrt(math.pi)
    assert t_tail_constant(alpha) == pytest.approx(ref, rel=1e-14)
    y = 1e6
    assert t_tail_constant(alpha) == pytest.approx(y**alpha * stats.t(alpha).sf(y), rel=1e-4)
    assert y**alpha * stats.t(alpha).cdf(-y) == pytest.approx(t_tail_constant(alpha), rel=1e-4)
    for a in (1.01, 1.3, 1.99):
        assert t_tail_constant(a) > 0
    with pytest.raises(ValueError):
        t_tail_constant(2.0)


def test_t_expectile_symmetry():
    for alpha in (1.1, 1.5, 4.0):
        t = StudentT(alpha)
        assert solve_expectile(t, 0.5) == 0.0
        for tau in (0.05, 0.3, 0.8, 0.99):
            assert solve_expectile(t, 1 - tau) == pytest.approx(-solve_expectile(t, tau), abs=1e-12)


@pytest.mark.parametrize("alpha,tau", [(1.5, 0.8), (1.2, 0.95), (3.0, 0.3)])
def test_t_expectile_quadrature_oracle(alpha, tau):
    assert solve_expectile(StudentT(alpha), tau) == pytest.approx(quad_expectile(alpha, tau), abs=1e-8)


@pytest.mark.parametrize("m", [THREE, StudentT(1.5), StudentT(3), DiscreteDistribution([-5, 0, 100], [0.3, 0.69, 0.01])])
def test_first_order_condition_and_monotone(m):
    mus = []
    for tau in np.linspace(0.01, 0.99, 49):
        mu = solve_expectile(m, tau)
        scale = 1 + abs(m.mean) + float(m.upper_partial(m.mean))
        assert abs(float(m.identification(mu, tau))) <= 1e-12 * scale
        mus.append(mu)
    assert np.all(np.diff(mus) > 0)


def test_solver_errors():
    with pytest.raises(ValueError):
        solve_expectile(THREE, 0.0)
    with pytest.raises(ValueError):
        solve_expectile(THREE, 0.5, tol=0)
    assert issubclass(ConvergenceError, RuntimeError)


# ------------------------------------------------------------------ derivative

@pytest.mark.parametrize("m", [StudentT(3), StudentT(1.5), THREE])
def test_derivative_finite_difference(m):
    h = 1e-5
    for tau in GRID:
        mu = float(m.expectile(tau))
        if float(m.point_mass(mu)) > 0:
            with pytest.raises(ValueError, match="atom"):
                expectile_derivative(m, tau)
            continue
        fd = (solve_expectile(m, tau + h) - solve_expectile(m, tau - h)) / (2 * h)
        d = expectile_derivative(m, tau)
        assert d > 0
        assert d == pytest.approx(fd, abs=1e-6)


def test_derivative_t3_at_half():
    # numerator E|Y| = 2 sqrt(3) / pi, denominator 1/2
    assert expectile_derivative(StudentT(3), 0.5) == pytest.approx(4 * math.sqrt(3) / math.pi, rel=1e-12)
