"""Spectra: Hermitian eigensolves, empirical spectral measures, entropy.

Eigenvalues are always reported sorted ascending.  Empirical measures carry
the bulk rescalings used for Marchenko-Pastur comparisons: lambda/n for
Wishart matrices and c*n*lambda (c = k/n) for density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse.linalg

from .errors import DomainError, NonHermitianError, NumericalError
from .sampling import DensityMatrix, WishartSample

HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-10
SIMPLEX_SUM_TOL = 1e-8
ZERO_EIGENVALUE_TOL = 1e-10

# Below this matrix size a full dense eigensolve beats the iterative path.
_DENSE_EIG_CUTOFF = 256


class SpectrumKind(Enum):
    GENERIC = "generic"
    WISHART = "wishart"
    DENSITY = "density"


class Rescale(Enum):
    NONE = "none"
    WISHART_BULK = "wishart_bulk"
    DENSITY_BULK = "density_bulk"


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues sorted ascending, with their generating ensemble if known."""

    values: np.ndarray
    kind: SpectrumKind = SpectrumKind.GENERIC
    n: int | None = None
    k: int | None = None
    rescale: Rescale = Rescale.NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 1 or self.values.size == 0:
            raise DomainError("spectrum must be a nonempty 1-d real vector")
        if np.any(np.diff(self.values) < 0.0):
            raise DomainError("spectrum values must be sorted ascending")
        if self.kind is SpectrumKind.DENSITY and self.rescale is Rescale.NONE:
            if abs(float(self.values.sum()) - 1.0) > HERMITIAN_TOL:
                raise DomainError("density-matrix spectrum must sum to 1")
            if self.values[0] < -ZERO_EIGENVALUE_TOL:
                raise DomainError("density-matrix spectrum has a negative eigenvalue")


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Finitely supported probability measure: atom locations and weights."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", np.asarray(self.locations, dtype=np.float64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        if self.locations.shape != self.weights.shape or self.locations.ndim != 1:
            raise DomainError("locations and weights must be 1-d vectors of equal length")
        if self.locations.size == 0:
            raise DomainError("empirical measure must have at least one atom")
        if np.any(self.weights < 0.0) or abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")


def _require_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise NonHermitianError(f"expected a square matrix, got shape {m.shape}")
    m = m.astype(np.complex128, copy=False)
    scale = max(1.0, float(np.linalg.norm(m)))
    if float(np.linalg.norm(m - m.conj().T)) > HERMITIAN_TOL * scale:
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    return m


def eigenvalues_hermitian(m: np.ndarray) -> Spectrum:
    """Eigenvalues of a Hermitian matrix, sorted ascending.

    Raises NonHermitianError when the input fails the Hermitian check and
    NumericalError when the solver does not converge.
    """
    m = _require_hermitian(m)
    try:
        values = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed to converge: {exc}") from exc
    return Spectrum(values=values)


def hermitian_eigensystem(m: np.ndarray) -> tuple[Spectrum, np.ndarray]:
    """Full eigendecomposition (ascending eigenvalues, eigenvector columns).

    The reconstruction residual ||M - V diag(w) V*||_F is checked against
    1e-10 * max(1, ||M||_F); a violation raises NumericalError.
    """
    m = _require_hermitian(m)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed to converge: {exc}") from exc
    residual = float(np.linalg.norm(m - (vectors * values) @ vectors.conj().T))
    if residual > RESIDUAL_TOL * max(1.0, float(np.linalg.norm(m))):
        raise NumericalError(f"eigendecomposition residual {residual:.3e} exceeds tolerance")
    return Spectrum(values=values), vectors


def wishart_spectrum(w: WishartSample) -> Spectrum:
    """Eigenvalues of a Wishart sample, tagged with its (n, k)."""
    base = eigenvalues_hermitian(w.matrix)
    return Spectrum(values=base.values, kind=SpectrumKind.WISHART, n=w.n, k=w.k)


def density_spectrum(rho: DensityMatrix) -> Spectrum:
    """Eigenvalues of a density matrix, tagged with its generating (n, k).

    When n > k the sample is rank-deficient by construction and exactly
    n - k of the reported eigenvalues are numerical zeros (kept, not
    discarded, so the spectrum stays a point of the simplex).
    """
    base = eigenvalues_hermitian(rho.matrix)
    values = base.values
    total = float(values.sum())
    if abs(total - 1.0) > HERMITIAN_TOL:
        raise DomainError(f"density-matrix eigenvalues sum to {total!r}, expected 1")
    return Spectrum(values=values, kind=SpectrumKind.DENSITY, n=rho.n, k=rho.k)


def empirical_measure(s: Spectrum, rescale: Rescale = Rescale.NONE) -> EmpiricalMeasure:
    """Uniform measure on the spectrum, optionally rescaled for bulk limits.

    WISHART_BULK places atoms at lambda/n; DENSITY_BULK at c*n*lambda with
    c = k/n taken from the spectrum's own parameters (so c*n is exactly k).
    Requesting a rescale that does not match the spectrum's ensemble is a
    usage error.
    """
    if s.rescale is not Rescale.NONE:
        raise DomainError("spectrum is already rescaled")
    if rescale is Rescale.NONE:
        locations = s.values
    elif rescale is Rescale.WISHART_BULK:
        if s.kind is not SpectrumKind.WISHART or s.n is None:
            raise DomainError("WISHART_BULK requires a Wishart spectrum with known n")
        locations = s.values / s.n
    elif rescale is Rescale.DENSITY_BULK:
        if s.kind is not SpectrumKind.DENSITY or s.n is None or s.k is None:
            raise DomainError("DENSITY_BULK requires a density spectrum with known (n, k)")
        locations = s.k * s.values
    else:  # pragma: no cover - enum is exhaustive
        raise DomainError(f"unknown rescale {rescale!r}")
    n_atoms = locations.size
    return EmpiricalMeasure(locations=locations, weights=np.full(n_atoms, 1.0 / n_atoms))


def largest_eigenvalue(s: Spectrum) -> float:
    """Largest eigenvalue of a spectrum (the last entry of the sorted values)."""
    return float(s.values[-1])


def top_wishart_eigenvalue(x: np.ndarray) -> float:
    """Largest eigenvalue of X X* without a full eigensolve.

    For small factors this is a dense eigvalsh; for large ones a Lanczos
    iteration on the Gram operator v -> X (X* v), seeded with a fixed start
    vector so repeated calls are bit-identical.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DomainError(f"factor must be a 2-d matrix, got shape {x.shape}")
    n = x.shape[0]
    if n < _DENSE_EIG_CUTOFF:
        w = x @ x.conj().T
        return float(np.linalg.eigvalsh(0.5 * (w + w.conj().T))[-1])
    xh = x.conj().T
    op = scipy.sparse.linalg.LinearOperator(
        shape=(n, n),
        matvec=lambda v: x @ (xh @ v),
        dtype=np.complex128,
    )
    v0 = np.full(n, 1.0 / np.sqrt(n))
    try:
        vals = scipy.sparse.linalg.eigsh(op, k=1, which="LA", v0=v0, return_eigenvectors=False)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise NumericalError(f"Lanczos iteration did not converge: {exc}") from exc
    return float(vals[0])


def von_neumann_entropy(s: Spectrum | np.ndarray) -> float:
    """-sum(p log p) over a simplex spectrum, natural log, 0 log 0 = 0.

    Entries in [-1e-10, 0) are treated as exact zeros; anything more negative
    is rejected.
    """
    values = np.asarray(s.values if isinstance(s, Spectrum) else s, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DomainError("entropy requires a nonempty 1-d spectrum")
    if values.min() < -ZERO_EIGENVALUE_TOL:
        raise DomainError(f"eigenvalue {values.min()} below -{ZERO_EIGENVALUE_TOL}")
    if abs(float(values.sum()) - 1.0) > SIMPLEX_SUM_TOL:
        raise DomainError("entropy requires eigenvalues summing to 1")
    p = np.clip(values, 0.0, None)
    mask = p > 0.0
    return float(-(p[mask] * np.log(p[mask])).sum())
