import math

import numpy as np
import pytest
import scipy.stats

from rdmlab import (
    DensityMatrix,
    DomainError,
    EmpiricalMeasure,
    NonHermitianError,
    Rescale,
    RngStream,
    Spectrum,
    SpectrumKind,
    density_spectrum,
    eigenvalues_hermitian,
    empirical_measure,
    hermitian_eigensystem,
    largest_eigenvalue,
    sample_density_matrix,
    sample_ginibre,
    sample_wishart,
    top_wishart_eigenvalue,
    von_neumann_entropy,
    wishart_spectrum,
)


def test_eigenvalues_examples():
    s = eigenvalues_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert s.kind is SpectrumKind.GENERIC
    assert np.allclose(s.values, [1.0, 2.0, 3.0])
    assert np.allclose(eigenvalues_hermitian(np.eye(4) * 0.25).values, [0.25] * 4)
    flip = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(eigenvalues_hermitian(flip).values, [-1.0, 1.0])


def test_eigenvalues_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonHermitianError):
        eigenvalues_hermitian(np.ones((2, 3)))


@pytest.mark.parametrize("n", [50, 300])
def test_eigensystem_reconstructs(n):
    x = sample_ginibre(n, n, RngStream(31, n))
    m = x + x.conj().T
    spec, vectors = hermitian_eigensystem(m)
    residual = np.linalg.norm(m @ vectors - vectors * spec.values)
    assert residual <= 1e-10 * max(1.0, np.linalg.norm(m))
    assert np.all(np.diff(spec.values) >= 0.0)


def test_spectrum_kinds_tagged():
    w = sample_wishart(3, 5, RngStream(41, 0))
    s = wishart_spectrum(w)
    assert s.kind is SpectrumKind.WISHART and (s.n, s.k) == (3, 5)
    rho = sample_density_matrix(3, 5, RngStream(41, 1))
    t = density_spectrum(rho)
    assert t.kind is SpectrumKind.DENSITY
    assert abs(t.values.sum() - 1.0) < 1e-10


def test_density_spectrum_examples():
    rho = DensityMatrix(matrix=np.diag([0.25, 0.75]).astype(complex), n=2, k=2)
    s = density_spectrum(rho)
    assert np.allclose(s.values, [0.25, 0.75])


def test_tall_case_has_null_eigenvalues():
    # with k < n the state is rank deficient: n - k exact zeros
    rho = sample_density_matrix(3, 2, RngStream(43, 0))
    s = density_spectrum(rho)
    assert s.values[0] <= 1e-10


def test_spectrum_validation():
    with pytest.raises(DomainError):
        Spectrum(values=np.array([2.0, 1.0]))
    with pytest.raises(DomainError):
        Spectrum(values=np.array([0.3, 0.4]), kind=SpectrumKind.DENSITY, n=2, k=2)


def test_empirical_measure_density_rescaling():
    s = Spectrum(values=np.array([0.25, 0.75]), kind=SpectrumKind.DENSITY, n=2, k=2)
    em = empirical_measure(s, Rescale.DENSITY_BULK)
    assert np.allclose(em.locations, [0.5, 1.5])
    assert np.allclose(em.weights, [0.5, 0.5])


def test_empirical_measure_wishart_rescaling():
    s = Spectrum(values=np.array([2.0, 6.0]), kind=SpectrumKind.WISHART, n=2, k=4)
    em = empirical_measure(s, Rescale.WISHART_BULK)
    assert np.allclose(em.locations, [1.0, 3.0])


def test_empirical_measure_mismatched_rescale():
    s = Spectrum(values=np.array([0.25, 0.75]), kind=SpectrumKind.DENSITY, n=2, k=2)
    with pytest.raises(DomainError):
        empirical_measure(s, Rescale.WISHART_BULK)
    scaled = Spectrum(
        values=np.array([0.5, 1.5]),
        kind=SpectrumKind.DENSITY,
        n=2,
        k=2,
        rescale=Rescale.DENSITY_BULK,
    )
    with pytest.raises(DomainError):
        empirical_measure(scaled, Rescale.DENSITY_BULK)


def test_empirical_measure_weight_validation():
    with pytest.raises(DomainError):
        EmpiricalMeasure(locations=np.array([0.0, 1.0]), weights=np.array([0.7, 0.7]))
    with pytest.raises(DomainError):
        EmpiricalMeasure(locations=np.array([0.0]), weights=np.array([-1.0]))


def test_largest_eigenvalue():
    s = Spectrum(values=np.array([0.1, 0.4, 0.5]), kind=SpectrumKind.DENSITY, n=3, k=3)
    assert largest_eigenvalue(s) == 0.5


def test_top_wishart_eigenvalue_matches_dense():
    # above the dense cutoff the Lanczos path takes over; both must agree
    x = sample_ginibre(300, 600, RngStream(51, 0))
    lam = top_wishart_eigenvalue(x)
    dense = np.linalg.eigvalsh(x @ x.conj().T)[-1]
    assert lam == pytest.approx(dense, rel=1e-9)


def test_top_wishart_eigenvalue_deterministic():
    x = sample_ginibre(300, 300, RngStream(52, 0))
    assert top_wishart_eigenvalue(x) == top_wishart_eigenvalue(x.copy())


def test_entropy_examples():
    assert von_neumann_entropy(np.array([0.0, 1.0])) == 0.0
    assert von_neumann_entropy(np.array([0.5, 0.5])) == pytest.approx(math.log(2.0))
    assert von_neumann_entropy(np.array([0.25, 0.75])) == pytest.approx(
        0.5623351446188083
    )


def test_entropy_accepts_spectrum():
    s = Spectrum(values=np.array([0.25, 0.75]), kind=SpectrumKind.DENSITY, n=2, k=2)
    assert von_neumann_entropy(s) == pytest.approx(0.5623351446188083)


def test_entropy_tolerates_eigensolver_noise():
    assert von_neumann_entropy(np.array([-1e-12, 0.5, 0.5 + 1e-12])) == pytest.approx(
        math.log(2.0), abs=1e-9
    )


def test_entropy_rejects_bad_input():
    with pytest.raises(DomainError):
        von_neumann_entropy(np.array([-0.1, 1.1]))
    with pytest.raises(DomainError):
        von_neumann_entropy(np.array([0.2, 0.2]))


def test_entropy_bounds_on_draws():
    stream = RngStream(61, 0)
    for n, k in [(2, 2), (4, 4), (3, 9)]:
        for _ in range(50):
            s = von_neumann_entropy(density_spectrum(sample_density_matrix(n, k, stream)))
            assert 0.0 <= s <= math.log(n) + 1e-12


def test_swap_rule_relates_transposed_shapes():
    # nonzero density-matrix eigenvalues for (n, k) and (k, n) share one law;
    # the tall case just adds n - k exact zeros
    draws = 10**4
    stream_a = RngStream(71, 0)
    stream_b = RngStream(71, 1)
    tall = np.empty((draws, 2))
    wide = np.empty((draws, 2))
    for i in range(draws):
        tall[i] = density_spectrum(sample_density_matrix(4, 2, stream_a)).values[2:]
        wide[i] = density_spectrum(sample_density_matrix(2, 4, stream_b)).values
    assert scipy.stats.ks_2samp(tall[:, 1], wide[:, 1]).statistic < 0.03
    assert scipy.stats.ks_2samp(tall[:, 0], wide[:, 0]).statistic < 0.03
