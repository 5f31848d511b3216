"""Samplers: Ginibre matrices, Wishart matrices, induced density matrices, Dirichlet vectors.

The density-matrix sampler follows the Gaussian route: fill an n x k matrix X
with iid standard complex Gaussians, form W = X X*, and normalize by the
trace.  All samplers are pure functions of (parameters, stream) and are safe
to call concurrently from workers holding distinct streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DimensionError
from .streams import RngStream

HERMITIAN_RTOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
TRACE_TOL = 1e-12

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class WishartSample:
    """W = X X* for a Ginibre factor X, with its parameters and trace."""

    matrix: np.ndarray
    n: int
    k: int
    trace: float


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace, Hermitian, positive semidefinite matrix with its generating (n, k)."""

    matrix: np.ndarray
    n: int
    k: int


def _check_dims(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise DimensionError(f"matrix dimensions must be positive, got n={n}, k={k}")


def sample_ginibre(n: int, k: int, stream: RngStream) -> np.ndarray:
    """Draw an n x k matrix of iid standard complex Gaussians.

    Each entry has independent real and imaginary parts of mean 0 and
    variance 1/2 (complex variance 1).  Entries are generated by an
    amplitude-phase Box-Muller transform consuming exactly two uniforms per
    entry: amplitude sqrt(-log(1 - u1)), phase 2*pi*u2, both uniform blocks
    drawn row-major.  The fixed consumption keeps sequences stable.
    """
    _check_dims(n, k)
    u = stream.uniforms((2, n, k))
    amplitude = np.sqrt(-np.log1p(-u[0]))
    phase = _TWO_PI * u[1]
    return amplitude * np.cos(phase) + 1j * (amplitude * np.sin(phase))


def wishart_from_factor(x: np.ndarray) -> WishartSample:
    """Form W = X X*, symmetrized to keep the Hermitian invariant tight."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionError(f"factor must be a 2-d matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x.view(np.float64))):
        raise DimensionError("factor contains non-finite entries")
    w = x @ x.conj().T
    w = 0.5 * (w + w.conj().T)
    n, k = x.shape
    return WishartSample(matrix=w, n=n, k=k, trace=float(np.trace(w).real))


def induced_density(w: WishartSample) -> DensityMatrix:
    """Normalize a Wishart sample by its trace: rho = W / tr W."""
    if w.trace <= 0.0:
        raise DegenerateError("Wishart sample has non-positive trace; cannot normalize")
    return DensityMatrix(matrix=w.matrix / w.trace, n=w.n, k=w.k)


def sample_wishart(n: int, k: int, stream: RngStream) -> WishartSample:
    """One Wishart draw of parameters (n, k)."""
    return wishart_from_factor(sample_ginibre(n, k, stream))


def sample_density_matrix(n: int, k: int, stream: RngStream) -> DensityMatrix:
    """One draw of an n x n density matrix whose environment has dimension k.

    The 1 x 1 case is returned as [[1.]] without consuming the stream; any
    other size follows the Ginibre -> Wishart -> normalize pipeline.
    """
    _check_dims(n, k)
    if n == 1 and k == 1:
        return DensityMatrix(matrix=np.ones((1, 1), dtype=np.complex128), n=1, k=1)
    return induced_density(sample_wishart(n, k, stream))


def sample_dirichlet(n: int, alpha: float, stream: RngStream) -> np.ndarray:
    """Symmetric Dirichlet(alpha) vector on the (n-1)-simplex.

    Gamma-normalization construction: n independent Gamma(alpha, 1) variates
    divided by their sum.
    """
    if n < 1:
        raise DimensionError(f"dimension must be positive, got n={n}")
    if not alpha > 0.0:
        raise DimensionError(f"alpha must be positive, got {alpha}")
    g = stream.standard_gamma(alpha, n)
    total = g.sum()
    if total <= 0.0:
        raise DegenerateError("all Gamma variates underflowed to zero")
    return g / total


def validate_wishart(w: WishartSample, rtol: float = HERMITIAN_RTOL) -> None:
    """Raise if W is not Hermitian/PSD within tolerance or the trace is stale.

    Diagnostic check (costs one eigendecomposition); the samplers guarantee
    these invariants by construction and do not pay for it per draw.
    """
    m = w.matrix
    scale = max(1.0, float(np.linalg.norm(m)))
    if float(np.linalg.norm(m - m.conj().T)) > rtol * scale:
        raise DegenerateError("Wishart matrix is not Hermitian within tolerance")
    if abs(float(np.trace(m).real) - w.trace) > rtol * scale:
        raise DegenerateError("stored trace disagrees with the matrix diagonal")
    eigs = np.linalg.eigvalsh(m)
    if eigs.size and eigs[0] < EIGENVALUE_FLOOR * scale:
        raise DegenerateError(f"Wishart matrix has eigenvalue {eigs[0]} below the PSD floor")


def validate_density(rho: DensityMatrix) -> None:
    """Raise if rho violates the density-matrix invariants (diagnostic check)."""
    m = rho.matrix
    if abs(float(np.trace(m).real) - 1.0) > TRACE_TOL:
        raise DegenerateError(f"trace {np.trace(m).real!r} is not 1 within {TRACE_TOL}")
    if float(np.linalg.norm(m - m.conj().T)) > HERMITIAN_RTOL * max(1.0, float(np.linalg.norm(m))):
        raise DegenerateError("density matrix is not Hermitian within tolerance")
    eigs = np.linalg.eigvalsh(m)
    if eigs[0] < EIGENVALUE_FLOOR:
        raise DegenerateError(f"density matrix has eigenvalue {eigs[0]} below {EIGENVALUE_FLOOR}")
