import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from glstail.conjugate import TailBound, tail_from_psi
from glstail.errors import DomainError, NonFiniteError
from glstail.moments import (
    EmpiricalSample,
    MomentOracle,
    check_tail_dominance,
    constant_oracle,
    empirical_moment,
    empirical_tail,
    exponential_oracle,
    function_oracle,
    gaussian_oracle,
    gls_norm,
    natural_function,
    rademacher_oracle,
    sample_oracle,
    uniform_oracle,
)
from glstail.psi_functions import PDomain, make_constant, make_power

from conftest import gaussian_abs_moment_quad

samples = arrays(
    np.float64,
    st.integers(1, 60),
    elements=st.floats(0.0, 1e3, allow_nan=False, allow_infinity=False),
)


# empirical_moment


def test_constant_sample_moment():
    est = empirical_moment(EmpiricalSample(np.ones(4)), 3)
    assert est.value == 1.0
    assert est.stderr == 0.0


def test_two_point_sample_moment():
    assert empirical_moment(EmpiricalSample(np.array([0.0, 2.0])), 2).value == pytest.approx(math.sqrt(2), rel=1e-15)


def test_normal_second_moment(rng):
    s = EmpiricalSample.from_outcomes(rng.standard_normal(1_000_000))
    est = empirical_moment(s, 2)
    assert abs(est.value - 1.0) < 0.005
    assert 0 < est.stderr < 0.002


def test_large_p_is_stable():
    # direct sum of 1e3**400 would overflow
    s = EmpiricalSample(np.array([1e3, 1.0, 0.5]))
    assert empirical_moment(s, 400).value == pytest.approx(1e3 * 3 ** (-1 / 400), rel=1e-12)


def test_jackknife_stderr_matches_delta_method(rng):
    # for p=1 the jackknife stderr of the mean is exactly sd / sqrt(n)
    x = rng.exponential(size=500)
    est = empirical_moment(EmpiricalSample(x), 1)
    assert est.stderr == pytest.approx(np.std(x, ddof=1) / math.sqrt(x.size), rel=1e-9)


def test_moment_order_below_one_rejected():
    with pytest.raises(DomainError):
        empirical_moment(EmpiricalSample(np.ones(3)), 0.5)


def test_single_value_sample():
    est = empirical_moment(EmpiricalSample(np.array([2.0])), 2)
    assert est == (2.0, 0.0)


def test_sample_validation():
    with pytest.raises(ValueError):
        EmpiricalSample(np.array([-1.0, 2.0]))
    with pytest.raises(ValueError):
        EmpiricalSample(np.array([]))
    with pytest.raises(ValueError):
        EmpiricalSample(np.array([1.0, np.inf]))
    s = EmpiricalSample(np.array([3.0, 1.0, 2.0]))
    assert list(s.values) == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_sample_csv_round_trip(tmp_path):
    s = EmpiricalSample(np.array([0.1, 2.5, 1e-300, 7.0]), "seed=1")
    path = s.to_csv(tmp_path / "s.csv")
    assert path.read_text().splitlines()[0] == "value"
    assert np.array_equal(EmpiricalSample.load_csv(path).values, s.values)


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.0, 40.0), st.floats(1.0, 40.0))
def test_lyapunov_monotone_empirical(x, p1, p2):
    s = EmpiricalSample(x)
    lo, hi = sorted((p1, p2))
    assert empirical_moment(s, lo).value <= empirical_moment(s, hi).value * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.0, 30.0), st.floats(1e-3, 1e3))
def test_scaling(x, p, c):
    s = EmpiricalSample(x)
    assert empirical_moment(s.scaled(c), p).value == pytest.approx(c * empirical_moment(s, p).value, rel=1e-12, abs=0)


# empirical_tail


def test_tail_examples():
    s = EmpiricalSample(np.array([0.5, 1.5]))
    assert empirical_tail(s, 1.0).fraction == 0.5
    assert empirical_tail(s, 0.1).fraction == 1.0
    assert empirical_tail(s, 1.5).fraction == 0.0
    assert empirical_tail(s, 9.0).fraction == 0.0


def test_tail_strict_inequality_and_stderr():
    s = EmpiricalSample(np.array([1.0, 1.0, 2.0, 3.0]))
    f, se = empirical_tail(s, 1.0)
    assert f == 0.5
    assert se == pytest.approx(math.sqrt(0.25 / 4))
    f, _ = empirical_tail(s, np.array([0.0, 1.0, 2.0, 3.0]))
    assert list(f) == [1.0, 0.5, 0.25, 0.0]


@settings(max_examples=60, deadline=None)
@given(samples, arrays(np.float64, 8, elements=st.floats(-10, 2e3)))
def test_tail_nonincreasing(x, t):
    f, _ = empirical_tail(EmpiricalSample(x), np.sort(t))
    assert np.all(np.diff(f) <= 0)


# oracles and gls_norm


def test_gls_norm_trivial_examples():
    assert gls_norm(rademacher_oracle(), make_constant(1.0)).value == 1.0
    assert gls_norm(constant_oracle(2.5), make_constant(1.0)).value == 2.5


def test_gaussian_norm_example():
    kappa = make_power(2, PDomain.closed(1, 3))
    p = np.array([1.0, 2.0, 3.0])
    ratios = gaussian_oracle()(p) / kappa(p)
    expected = np.array([gaussian_abs_moment_quad(q) for q in p]) / np.sqrt(p)
    np.testing.assert_allclose(ratios, expected, rtol=1e-9)
    np.testing.assert_allclose(ratios, [0.7979, 0.7071, 0.6748], atol=5e-4)
    res = gls_norm(gaussian_oracle(), kappa, grid=p)
    assert res.value == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)
    assert res.p == 1.0


@pytest.mark.parametrize(
    "oracle, density, support",
    [
        (exponential_oracle(2.0), lambda x: 2 * math.exp(-2 * x), (0, np.inf)),
        (uniform_oracle(3.0), lambda x: 1 / 3, (0, 3)),
    ],
)
def test_analytic_oracles_against_quadrature(oracle, density, support):
    for p in (1.0, 2.5, 7.0):
        m, _ = integrate.quad(lambda x: x**p * density(x), *support)
        assert oracle(p) == pytest.approx(m ** (1 / p), rel=1e-9)


def test_oracle_infinite_beyond_finite_up_to():
    beta = make_power(2, PDomain.closed(1, 4))
    eta = function_oracle(beta)
    assert eta(4.0) == 2.0
    assert math.isinf(eta(4.5))


def test_natural_function_examples():
    assert np.all(natural_function(rademacher_oracle())(np.array([1.0, 7.0, 300.0])) == 1.0)
    assert natural_function(gaussian_oracle())(2.0) == pytest.approx(1.0, rel=1e-14)
    assert natural_function(exponential_oracle())(2.0) == pytest.approx(math.sqrt(2), rel=1e-14)


def test_natural_function_rejects_infinite_oracle():
    eta = function_oracle(make_power(2, PDomain.closed(1, 4)))
    with pytest.raises(DomainError):
        natural_function(eta, PDomain.closed(1, 8))


def test_nonfinite_ratio_is_an_error():
    eta = MomentOracle(lambda p: np.where(p > 3, np.inf, 1.0), label="blows up at 3")
    with pytest.raises(NonFiniteError):
        gls_norm(eta, make_constant(1.0, PDomain.closed(1, 8)), grid=np.array([2.0, 6.0]))


def _oracles():
    x = np.random.default_rng(3).standard_normal(2000)
    return [
        rademacher_oracle(),
        constant_oracle(0.3),
        gaussian_oracle(2.0),
        exponential_oracle(0.5),
        uniform_oracle(4.0),
        sample_oracle(EmpiricalSample.from_outcomes(x)),
    ]


@pytest.mark.parametrize("oracle", _oracles(), ids=lambda o: o.label)
def test_natural_norm_is_one(oracle):
    res = gls_norm(oracle, natural_function(oracle, PDomain.closed(1, 50)), grid=64)
    assert res.value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("oracle", _oracles(), ids=lambda o: o.label)
def test_lyapunov_monotone_oracles(oracle):
    p = np.geomspace(1, 50, 64)
    v = oracle(p)
    assert np.all(np.diff(v) >= -1e-9 * v[1:])


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3), st.sampled_from(range(6)))
def test_gls_homogeneity(c, k):
    oracle = _ORACLES[k]
    kappa = make_power(2)
    base = gls_norm(oracle, kappa, grid=64, p_max=50).value
    assert gls_norm(oracle.scaled(c), kappa, grid=64, p_max=50).value == pytest.approx(c * base, rel=1e-12)


_ORACLES = _oracles()


def test_norm_comparison_through_dominance_constant():
    from glstail.psi_functions import dominance_constant

    nu1, nu2 = make_power(2), make_power(1)
    c = dominance_constant(nu1, nu2, grid_size=128, p_max=100).value
    for oracle in _ORACLES:
        n1 = gls_norm(oracle, nu1, grid=128, p_max=100).value
        n2 = gls_norm(oracle, nu2, grid=128, p_max=100).value
        assert n2 <= c * n1 * (1 + 1e-12)


# check_tail_dominance


class _One:
    valid_from = 0.0

    def __call__(self, t):
        return np.ones_like(np.asarray(t, dtype=float))


def test_dominance_trivial_bound(rng):
    s = EmpiricalSample.from_outcomes(rng.standard_normal(5000))
    rep = check_tail_dominance(s, _One())
    assert rep.n_violations == 0
    assert rep.t.size > 0


def test_dominance_zero_sample():
    bound = TailBound.from_psi(make_power(2), 1.0, t_max=10.0)
    rep = check_tail_dominance(EmpiricalSample(np.zeros(1000)), bound)
    assert rep.n_violations == 0


def test_dominance_flags_a_wrong_bound(rng):
    s = EmpiricalSample.from_outcomes(rng.standard_normal(20_000))

    class Tiny:
        valid_from = 0.1

        def __call__(self, t):
            return np.full(np.shape(t), 1e-6)

    assert check_tail_dominance(s, Tiny()).n_violations > 0


def test_dominance_normal_natural_bound():
    # tail of a standard normal against the bound built from its own moments
    s = EmpiricalSample.from_outcomes(np.random.default_rng(11).standard_normal(100_000))
    kappa = natural_function(gaussian_oracle())
    bound = TailBound.from_psi(kappa, 1.0, t_max=10.0)
    rep = check_tail_dominance(s, bound)
    assert rep.t.size > 0 and rep.t[0] == pytest.approx(math.e)
    assert rep.n_violations == 0
    # the scalar path agrees with the table it was built from
    np.testing.assert_array_less(tail_from_psi(kappa, 1.0, rep.t) - 1e-9, rep.bound + 1e-12)


def test_dominance_report_csv(tmp_path, rng):
    s = EmpiricalSample.from_outcomes(rng.standard_normal(2000))
    path = check_tail_dominance(s, _One(), n_points=8).to_csv(tmp_path / "tail_report.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,empirical,stderr,bound,violation"
    assert len(lines) == 9
