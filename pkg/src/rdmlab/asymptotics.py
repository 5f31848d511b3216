"""Reference laws and convergence diagnostics.

Marchenko-Pastur with its atom at zero, the edge rescalings that send the
largest eigenvalue to a Tracy-Widom variable, the trace CLT statistic, and
the goodness-of-fit machinery (exact KS over atoms, chi-square with bin
merging).  Tracy-Widom itself is ingested as a tabulated CDF, never computed
here.
"""

from __future__ import annotations

import importlib.resources
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.integrate
import scipy.stats

from .errors import DomainError, NumericalError
from .exact import EnsembleParams
from .spectra import EmpiricalMeasure

CDF_ABS_TOL = 1e-8
MOMENT_ABS_TOL = 1e-9

_TW_TABLE_RESOURCE = "tracy_widom_gue_cdf.txt"


@dataclass(frozen=True)
class MarchenkoPastur:
    """Marchenko-Pastur law of ratio c: an atom of mass max(1-c, 0) at zero
    plus the density sqrt((x-a)(b-x)) / (2 pi x) on [a, b]."""

    c: float

    def __post_init__(self) -> None:
        if not self.c > 0.0:
            raise DomainError(f"ratio c must be positive, got {self.c}")

    @property
    def a(self) -> float:
        return (math.sqrt(self.c) - 1.0) ** 2

    @property
    def b(self) -> float:
        return (math.sqrt(self.c) + 1.0) ** 2

    @property
    def atom_weight(self) -> float:
        return max(1.0 - self.c, 0.0)


def mp_pdf(x: float | np.ndarray, law: MarchenkoPastur) -> float | np.ndarray:
    """Continuous-part density of the MP law (the atom is reported separately).

    Zero outside the open interval (a, b), including at the endpoints; for
    c = 1 the density diverges at the left edge and the value there is
    conventionally reported as 0.
    """
    arr = np.asarray(x, dtype=np.float64)
    inside = (arr > law.a) & (arr < law.b)
    out = np.zeros_like(arr)
    if np.any(inside):
        xv = arr[inside]
        out[inside] = np.sqrt((xv - law.a) * (law.b - xv)) / (2.0 * np.pi * xv)
    return out if arr.ndim else float(out)


def _mp_theta_integrand(law: MarchenkoPastur, power: int) -> Callable[[float], float]:
    """Integrand of int x^power dmu_c after x = a + (b-a) sin^2(theta).

    The substitution absorbs both square-root edges; at c = 1 (a = 0) the
    0/0 at theta = 0 cancels exactly to span*cos^2(theta)/pi.
    """
    a, span = law.a, law.b - law.a

    def integrand(theta: float) -> float:
        s = math.sin(theta)
        x = a + span * s * s
        if a == 0.0:
            base = span * math.cos(theta) ** 2 / math.pi
        else:
            s2 = math.sin(2.0 * theta)
            base = span * span * s2 * s2 / (4.0 * math.pi * x)
        return base * x**power if power else base

    return integrand


def mp_cdf(x: float, law: MarchenkoPastur) -> float:
    """CDF of the MP law, atom included: right-continuous, accurate to 1e-8."""
    if x < 0.0:
        return 0.0
    total = law.atom_weight
    if x > law.a:
        t = min((x - law.a) / (law.b - law.a), 1.0)
        theta_max = math.asin(math.sqrt(t))
        value, err = scipy.integrate.quad(
            _mp_theta_integrand(law, 0), 0.0, theta_max, epsabs=1e-12, epsrel=1e-12
        )
        if err > CDF_ABS_TOL:
            raise NumericalError(f"MP CDF quadrature error {err:.3e} at x={x}")
        total += value
    return min(total, 1.0)


def mp_moment(q: int, law: MarchenkoPastur) -> float:
    """q-th moment of the MP law (the atom contributes nothing for q >= 1)."""
    if q < 1:
        raise DomainError(f"moment order must be >= 1, got q={q}")
    value, err = scipy.integrate.quad(
        _mp_theta_integrand(law, q), 0.0, math.pi / 2.0, epsabs=1e-12, epsrel=1e-12
    )
    if err > MOMENT_ABS_TOL:
        raise NumericalError(f"MP moment quadrature error {err:.3e} at q={q}")
    return value


def _edge_scale(c: float) -> float:
    return (1.0 + math.sqrt(c)) * (1.0 + 1.0 / math.sqrt(c)) ** (1.0 / 3.0)


def edge_rescale_density(lam_max: float | np.ndarray, p: EnsembleParams) -> float | np.ndarray:
    """Fluctuation coordinate of the largest density-matrix eigenvalue.

    t = n^(2/3) * (c n lam_max - (sqrt(c)+1)^2) / ((1+sqrt(c))(1+1/sqrt(c))^(1/3))
    with c = k/n, so c*n is exactly k.
    """
    c = p.c
    centered = p.k * np.asarray(lam_max, dtype=np.float64) - (math.sqrt(c) + 1.0) ** 2
    t = p.n ** (2.0 / 3.0) * centered / _edge_scale(c)
    return t if t.ndim else float(t)


def edge_rescale_wishart(lam_max: float | np.ndarray, p: EnsembleParams) -> float | np.ndarray:
    """Fluctuation coordinate of the largest Wishart eigenvalue.

    t = (lam_max - n (sqrt(c)+1)^2) / (n^(1/3) (1+sqrt(c))(1+1/sqrt(c))^(1/3)).
    """
    c = p.c
    centered = np.asarray(lam_max, dtype=np.float64) - p.n * (math.sqrt(c) + 1.0) ** 2
    t = centered / (p.n ** (1.0 / 3.0) * _edge_scale(c))
    return t if t.ndim else float(t)


def trace_clt_statistic(s: float | np.ndarray, p: EnsembleParams) -> float | np.ndarray:
    """Standardized Wishart trace (S - nk) / sqrt(nk)."""
    nk = p.n * p.k
    t = (np.asarray(s, dtype=np.float64) - nk) / math.sqrt(nk)
    return t if t.ndim else float(t)


def ks_distance(emp: EmpiricalMeasure, reference_cdf: Callable[[float], float]) -> float:
    """Kolmogorov-Smirnov distance of an atomic measure to a reference CDF.

    The supremum is taken exactly over the atoms, checking the empirical CDF
    both at and just before each jump.
    """
    order = np.argsort(emp.locations, kind="stable")
    locs = emp.locations[order]
    cum = np.cumsum(emp.weights[order])
    uniq, first = np.unique(locs, return_index=True)
    last = np.append(first[1:], locs.size) - 1
    hi = cum[last]
    lo = np.where(first > 0, cum[np.maximum(first - 1, 0)], 0.0)
    ref = np.array([float(reference_cdf(v)) for v in uniq])
    return float(np.maximum(np.abs(hi - ref), np.abs(lo - ref)).max())


def histogram(emp: EmpiricalMeasure, edges: np.ndarray) -> np.ndarray:
    """Total atom weight per bin for sorted bin edges."""
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise DomainError("bin edges must be a strictly increasing 1-d vector")
    masses, _ = np.histogram(emp.locations, bins=edges, weights=emp.weights)
    return masses


@dataclass(frozen=True)
class GoFReport:
    """Outcome of one goodness-of-fit check."""

    name: str
    value: float
    sample_size: int
    threshold: float
    passed: bool

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise DomainError(f"statistic value must be nonnegative, got {self.value}")


def chi_square_gof(
    observed: np.ndarray,
    expected: np.ndarray,
    *,
    threshold: float = 1e-3,
    min_expected: float = 5.0,
) -> GoFReport:
    """Chi-square test of binned counts against expected counts.

    Adjacent bins are merged left to right until every group's expected count
    reaches `min_expected` (a short tail is folded into the last group); the
    p-value uses len(groups) - 1 degrees of freedom, appropriate when the
    expected probabilities are fixed a priori rather than fitted.
    """
    observed = np.asarray(observed, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if observed.shape != expected.shape or observed.ndim != 1:
        raise DomainError("observed and expected must be 1-d vectors of equal length")
    if np.any(expected < 0.0):
        raise DomainError("expected counts must be nonnegative")
    obs_groups: list[float] = []
    exp_groups: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_groups.append(acc_o)
            exp_groups.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if not obs_groups:
            raise DomainError("expected counts too small to form a single group")
        obs_groups[-1] += acc_o
        exp_groups[-1] += acc_e
    if len(obs_groups) < 2:
        raise DomainError("need at least two groups after merging")
    o_arr = np.array(obs_groups)
    e_arr = np.array(exp_groups)
    statistic = float(np.sum((o_arr - e_arr) ** 2 / e_arr))
    p_value = float(scipy.stats.chi2.sf(statistic, df=len(obs_groups) - 1))
    return GoFReport(
        name="chi_square_p_value",
        value=p_value,
        sample_size=int(round(float(observed.sum()))),
        threshold=threshold,
        passed=p_value > threshold,
    )


@dataclass(frozen=True)
class TracyWidomTable:
    """Tabulated CDF of the Tracy-Widom GUE law, linearly interpolated."""

    s: np.ndarray
    cdf_values: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=np.float64)
        cdf = np.asarray(self.cdf_values, dtype=np.float64)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "cdf_values", cdf)
        if s.ndim != 1 or s.shape != cdf.shape or s.size < 2:
            raise DomainError("table needs matching 1-d s and cdf columns")
        if np.any(np.diff(s) <= 0.0):
            raise DomainError("table abscissae must be strictly increasing")
        if np.any(np.diff(cdf) < 0.0):
            raise DomainError("table CDF must be nondecreasing")
        if s[0] > -5.0 or s[-1] < 3.0:
            raise DomainError("table must cover s in [-5, 3]")
        if not (cdf[0] < 1e-3 and cdf[-1] > 1.0 - 1e-3):
            raise DomainError("table CDF must run from below 0.001 to above 0.999")

    def cdf(self, s: float | np.ndarray) -> float | np.ndarray:
        out = np.interp(np.asarray(s, dtype=np.float64), self.s, self.cdf_values,
                        left=0.0, right=1.0)
        return out if out.ndim else float(out)

    @property
    def median(self) -> float:
        return float(np.interp(0.5, self.cdf_values, self.s))

    @classmethod
    def from_file(cls, path: str | Path) -> "TracyWidomTable":
        """Parse a two-column whitespace table; `#` starts a comment line."""
        comments: list[str] = []
        s_vals: list[float] = []
        cdf_vals: list[float] = []
        for raw in Path(path).read_text().splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line.lstrip("#").strip())
                continue
            fields = line.split()
            if len(fields) != 2:
                raise DomainError(f"expected two columns, got {len(fields)}: {line!r}")
            s_vals.append(float(fields[0]))
            cdf_vals.append(float(fields[1]))
        return cls(s=np.array(s_vals), cdf_values=np.array(cdf_vals),
                   provenance="\n".join(comments))

    @classmethod
    def bundled(cls) -> "TracyWidomTable":
        """The table shipped with the package."""
        resource = importlib.resources.files("rdmlab").joinpath("data", _TW_TABLE_RESOURCE)
        with importlib.resources.as_file(resource) as path:
            return cls.from_file(path)
