import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.integrate

from rdmlab import (
    DimensionError,
    DomainError,
    EnsembleParams,
    MomentMethod,
    MomentTable,
    RngStream,
    dirichlet_mean_sq_distance,
    log_density_eigs,
    log_density_wishart_eigs,
    log_norm_constant,
    moment_bridge_inverted,
    moment_explicit,
    moment_recurrence,
    moment_table,
    page_entropy,
    sample_wishart,
    wishart_moment,
)


def test_ensemble_params():
    p = EnsembleParams(2, 6)
    assert p.c == 3.0
    with pytest.raises(DimensionError):
        EnsembleParams(0, 4)
    with pytest.raises(DimensionError):
        EnsembleParams(3, -1)


@pytest.mark.parametrize(
    "n,k,expected",
    [(1, 1, 0.0), (2, 2, math.log(3.0)), (2, 3, math.log(30.0))],
)
def test_norm_constant_small_cases(n, k, expected):
    assert log_norm_constant(EnsembleParams(n, k)) == pytest.approx(expected, abs=1e-12)


def test_norm_constant_requires_wide():
    with pytest.raises(DomainError):
        log_norm_constant(EnsembleParams(3, 2))


@pytest.mark.parametrize("k", [2, 3])
def test_simplex_density_integrates_to_one(k):
    # n = 2 reduces to a single coordinate t in [0, 1]
    p = EnsembleParams(2, k)

    def f(t):
        return math.exp(log_density_eigs(p, np.array([t, 1.0 - t])))

    mass, err = scipy.integrate.quad(f, 0.0, 1.0)
    assert abs(mass - 1.0) < 1e-8 and err < 1e-8


def test_simplex_density_values():
    p = EnsembleParams(2, 2)
    assert log_density_eigs(p, np.array([1.0, 0.0])) == pytest.approx(math.log(3.0))
    assert log_density_eigs(p, np.array([0.5, 0.5])) == -math.inf

    p = EnsembleParams(2, 3)
    assert log_density_eigs(p, np.array([0.75, 0.25])) == pytest.approx(
        math.log(45.0 / 32.0)
    )
    # k > n: a zero coordinate kills the lam^(k-n) factor
    assert log_density_eigs(p, np.array([1.0, 0.0])) == -math.inf


def test_simplex_density_domain_checks():
    p = EnsembleParams(2, 2)
    with pytest.raises(DomainError):
        log_density_eigs(p, np.array([0.5, 0.4]))
    with pytest.raises(DomainError):
        log_density_eigs(p, np.array([-0.1, 1.1]))
    with pytest.raises(DomainError):
        log_density_eigs(p, np.array([0.2, 0.3, 0.5]))


def test_wishart_density_small_cases():
    one = EnsembleParams(1, 1)
    assert log_density_wishart_eigs(one, np.array([0.7])) == pytest.approx(-0.7)
    tall = EnsembleParams(1, 2)
    x = 1.3
    assert log_density_wishart_eigs(tall, np.array([x])) == pytest.approx(
        math.log(x) - x
    )

    def f(t):
        return math.exp(log_density_wishart_eigs(tall, np.array([t])))

    mass, _ = scipy.integrate.quad(f, 0.0, 60.0)
    assert abs(mass - 1.0) < 1e-8


def test_wishart_density_degenerate_points():
    p = EnsembleParams(2, 2)
    assert log_density_wishart_eigs(p, np.array([1.0, 1.0])) == -math.inf
    with pytest.raises(DomainError):
        log_density_wishart_eigs(p, np.array([-1.0, 2.0]))


@pytest.mark.parametrize(
    "n,k,q,expected",
    [
        (2, 2, 1, Fraction(1)),
        (2, 2, 2, Fraction(4, 5)),
        (2, 2, 3, Fraction(7, 10)),
        (2, 2, 4, Fraction(22, 35)),
        (3, 4, 2, Fraction(7, 13)),
        (1, 7, 5, Fraction(1)),
    ],
)
def test_moment_closed_forms(n, k, q, expected):
    p = EnsembleParams(n, k)
    value = float(expected)
    assert moment_explicit(p, q) == pytest.approx(value, rel=1e-14)
    assert moment_recurrence(p, q) == pytest.approx(value, rel=1e-12)
    assert moment_bridge_inverted(p, q) == pytest.approx(value, rel=1e-12)


@pytest.mark.parametrize(
    "n,k,q,expected",
    [(2, 3, 1, 6.0), (1, 1, 1, 1.0), (1, 1, 2, 2.0), (2, 2, 2, 16.0)],
)
def test_wishart_moment_values(n, k, q, expected):
    assert wishart_moment(EnsembleParams(n, k), q) == pytest.approx(expected, rel=1e-14)


def test_wishart_moment_against_draws():
    p = EnsembleParams(2, 3)
    stream = RngStream(33, 0)
    draws = 10**5
    tr_w2 = np.empty(draws)
    for i in range(draws):
        w = sample_wishart(p.n, p.k, stream).matrix
        tr_w2[i] = np.trace(w @ w).real
    se = tr_w2.std(ddof=1) / math.sqrt(draws)
    assert abs(tr_w2.mean() - wishart_moment(p, 2)) < 4.0 * se


@pytest.mark.parametrize("n,k", [(2, 2), (2, 10), (5, 5), (7, 31), (50, 50), (17, 50)])
def test_moment_routes_agree(n, k):
    p = EnsembleParams(n, k)
    for q in range(1, 11):
        reference = moment_explicit(p, q)
        assert abs(moment_recurrence(p, q) - reference) <= 1e-10 * reference
        assert abs(moment_bridge_inverted(p, q) - reference) <= 1e-10 * reference


def test_recurrence_drift_stays_small_at_high_order():
    # the float recurrence must track the exact route well past q = 30
    for n, k in [(2, 2), (5, 8), (20, 40)]:
        p = EnsembleParams(n, k)
        for q in range(1, 31):
            exact = moment_explicit(p, q)
            assert abs(moment_recurrence(p, q) - exact) <= 1e-8 * exact


def test_moment_order_validation():
    p = EnsembleParams(2, 2)
    with pytest.raises(DomainError):
        moment_explicit(p, 0)
    with pytest.raises(DomainError):
        moment_recurrence(p, -3)


def test_moment_table_contents():
    p = EnsembleParams(2, 5)
    table = moment_table(p, 6, MomentMethod.RECURRENCE)
    assert table.q_max == 6
    assert table.values[1] == 1.0
    assert all(table.values[q + 1] <= table.values[q] for q in range(1, 6))
    with pytest.raises(DomainError):
        moment_table(p, 0, MomentMethod.EXPLICIT)
    with pytest.raises(DomainError):
        moment_table(p, 3, MomentMethod.MONTE_CARLO)


def test_moment_table_validation():
    p = EnsembleParams(2, 2)
    with pytest.raises(DomainError):
        MomentTable(params=p, values={2: 0.8}, method=MomentMethod.EXPLICIT)
    with pytest.raises(DomainError):
        MomentTable(params=p, values={1: 1.0, 3: 0.7}, method=MomentMethod.EXPLICIT)
    with pytest.raises(DomainError):
        MomentTable(params=p, values={1: 0.9}, method=MomentMethod.EXPLICIT)
    with pytest.raises(DomainError):
        MomentTable(
            params=p, values={1: 1.0, 2: 1.1}, method=MomentMethod.RECURRENCE
        )
    # Monte Carlo tables may wobble above earlier entries but must stay positive
    MomentTable(params=p, values={1: 1.0, 2: 1.1}, method=MomentMethod.MONTE_CARLO)
    with pytest.raises(DomainError):
        MomentTable(params=p, values={1: -0.2}, method=MomentMethod.MONTE_CARLO)


def test_page_entropy_values():
    assert page_entropy(EnsembleParams(1, 4)) == 0.0
    assert page_entropy(EnsembleParams(2, 2)) == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert abs(page_entropy(EnsembleParams(2, 1000)) - math.log(2.0)) < 0.001
    with pytest.raises(DomainError):
        page_entropy(EnsembleParams(3, 2))


def test_page_entropy_below_max():
    for n, k in [(2, 2), (3, 7), (8, 8)]:
        s = page_entropy(EnsembleParams(n, k))
        assert 0.0 < s < math.log(n)


def test_dirichlet_mean_sq_distance_values():
    assert dirichlet_mean_sq_distance(2, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-14)
    alphas = [0.1, 0.5, 1.0, 5.0, 50.0]
    values = [dirichlet_mean_sq_distance(4, a) for a in alphas]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert dirichlet_mean_sq_distance(4, 1e-9) == pytest.approx(0.75, abs=1e-6)
    assert dirichlet_mean_sq_distance(4, 1e9) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(DimensionError):
        dirichlet_mean_sq_distance(1, 1.0)
    with pytest.raises(DomainError):
        dirichlet_mean_sq_distance(3, 0.0)
