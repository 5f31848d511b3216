"""Reproducible experiment driver.

Subcommands sample the ensembles, evaluate the closed forms, and run the
convergence studies, writing plot-ready CSV or JSON.  Reproducibility
contract: draw number i always uses the substream (master_seed, i) (offset
by a fixed block per parameter-sweep position), so outputs are byte-identical
across runs and across --workers settings; aggregation happens in draw-index
order in the parent process.

Exit codes: 0 when every configured --threshold-<metric> check passes (or
none are configured), 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.integrate

from . import __version__
from .asymptotics import (
    MarchenkoPastur,
    TracyWidomTable,
    chi_square_gof,
    edge_rescale_density,
    histogram,
    ks_distance,
    mp_cdf,
    mp_pdf,
)
from .errors import DomainError, RdmLabError
from .exact import (
    EnsembleParams,
    dirichlet_mean_sq_distance,
    log_density_eigs,
    moment_bridge_inverted,
    moment_explicit,
    moment_recurrence,
    page_entropy,
)
from .output import table_payload, write_csv, write_json
from .sampling import sample_density_matrix, sample_ginibre
from .spectra import (
    EmpiricalMeasure,
    Rescale,
    density_spectrum,
    empirical_measure,
    top_wishart_eigenvalue,
    von_neumann_entropy,
)
from .streams import RngStream

DENSITY_GRID_POINTS = 1001
DENSITY_HIST_BINS = 50
MP_HIST_BINS = 60

# Whether a metric passes a threshold by staying below it or above it.
_METRIC_SENSE: dict[str, str] = {
    "moment_sigma": "max",
    "mass_error": "max",
    "chi_square_p": "min",
    "max_rel_discrepancy": "max",
    "ks_median": "max",
    "ks_trend_violations": "max",
    "edge_mean_abs_error": "max",
    "sd_ratio_deviation": "max",
    "tw_ks": "max",
    "entropy_sigma": "max",
    "msd_trend_violations": "max",
}

Section = tuple[Sequence[str], list[Sequence[object]]]


@dataclass
class ExperimentConfig:
    command: str
    n_list: list[int]
    k_list: list[int]
    c: float | None
    q_max: int
    samples: int
    seed: int
    workers: int
    out: str
    fmt: str
    tw_table: str | None
    thresholds: dict[str, float] = field(default_factory=dict)

    def metadata(self) -> dict[str, object]:
        return {
            "version": __version__,
            "command": self.command,
            "n": ",".join(str(v) for v in self.n_list),
            "k": ",".join(str(v) for v in self.k_list),
            "c": "" if self.c is None else self.c,
            "q_max": self.q_max,
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
            "format": self.fmt,
            "tw_table": self.tw_table or "",
            "thresholds": ";".join(f"{k}={v:g}" for k, v in sorted(self.thresholds.items())),
        }


# ---------------------------------------------------------------------------
# draw workers (module level so they pickle into the process pool)

def _chunk_bounds(total: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(total / max(1, workers)))
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _run_chunks(fn: Callable, args: list[tuple], workers: int) -> list:
    if workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args))


def _spectra_chunk(args: tuple[int, int, int, int, int, int]) -> np.ndarray:
    """Sorted density-matrix spectra for draws [start, end) at stream base+i."""
    seed, n, k, base, start, end = args
    out = np.empty((end - start, n))
    for i in range(start, end):
        rho = sample_density_matrix(n, k, RngStream(seed, base + i))
        out[i - start] = density_spectrum(rho).values
    return out


def _unordered_lambda_chunk(args: tuple[int, int, int, int, int]) -> np.ndarray:
    """One eigenvalue per draw, chosen by a fair coin from the same stream.

    The coin makes the samples iid from the unordered-eigenvalue marginal,
    which is the law the theoretical curve describes.
    """
    seed, n, k, start, end = args
    out = np.empty(end - start)
    for i in range(start, end):
        stream = RngStream(seed, i)
        values = density_spectrum(sample_density_matrix(n, k, stream)).values
        pick = 0 if float(stream.uniforms(1)[0]) < 0.5 else n - 1
        out[i - start] = values[pick]
    return out


def _edge_chunk(args: tuple[int, int, int, int, int, int]) -> np.ndarray:
    """Largest density-matrix eigenvalue per draw, via the Gram operator."""
    seed, n, k, base, start, end = args
    out = np.empty(end - start)
    for i in range(start, end):
        x = sample_ginibre(n, k, RngStream(seed, base + i))
        s = float(np.linalg.norm(x)) ** 2
        out[i - start] = top_wishart_eigenvalue(x) / s
    return out


def _collect_spectra(cfg: ExperimentConfig, n: int, k: int, base: int) -> np.ndarray:
    args = [(cfg.seed, n, k, base, lo, hi) for lo, hi in _chunk_bounds(cfg.samples, cfg.workers)]
    return np.vstack(_run_chunks(_spectra_chunk, args, cfg.workers))


# ---------------------------------------------------------------------------
# subcommands

def _single(values: list[int], flag: str) -> int:
    if len(values) != 1:
        raise DomainError(f"{flag} takes exactly one value for this command")
    return values[0]


def _resolve_k(cfg: ExperimentConfig, n: int) -> int:
    if cfg.c is not None:
        if cfg.k_list:
            raise DomainError("give either --k or --c, not both")
        return max(1, round(cfg.c * n))
    if not cfg.k_list:
        raise DomainError("one of --k or --c is required")
    return _single(cfg.k_list, "--k")


def cmd_sample(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    n = _single(cfg.n_list, "--n")
    k = _resolve_k(cfg, n)
    p = EnsembleParams(n, k)
    eigs = _collect_spectra(cfg, n, k, base=0)

    spectra_rows: list[Sequence[object]] = [(i, *map(float, eigs[i])) for i in range(len(eigs))]
    summary_rows: list[Sequence[object]] = []
    worst_sigma = 0.0
    for q in range(1, cfg.q_max + 1):
        per_draw = np.sum(eigs**q, axis=1)
        mc = float(per_draw.mean())
        se = float(per_draw.std(ddof=1) / math.sqrt(len(per_draw))) if len(per_draw) > 1 else 0.0
        exact = moment_recurrence(p, q)
        sigma = abs(mc - exact) / se if se > 0.0 else 0.0
        if q >= 2:
            worst_sigma = max(worst_sigma, sigma)
        summary_rows.append((q, exact, mc, se, mc - exact, sigma))

    sections = {
        "spectra": (["draw", *[f"lambda_{j + 1}" for j in range(n)]], spectra_rows),
        "summary": (["q", "exact", "mc_mean", "mc_se", "error", "sigma"], summary_rows),
    }
    return sections, {"moment_sigma": worst_sigma}, []


def cmd_density(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    n = _single(cfg.n_list, "--n")
    k = _resolve_k(cfg, n)
    if n not in (2, 3):
        raise DomainError("theoretical-curve grids are supported for n = 2 and n = 3 only")
    p = EnsembleParams(n, k)
    sections: dict[str, Section] = {}
    metrics: dict[str, float] = {}
    notices: list[str] = []

    if n == 2:
        grid = np.linspace(0.0, 1.0, DENSITY_GRID_POINTS)
        phi = np.array([math.exp(log_density_eigs(p, np.array([x, 1.0 - x]))) for x in grid])
        sections["curve"] = (["lambda_1", "phi"], [(float(x), float(f)) for x, f in zip(grid, phi)])
        mass = float(scipy.integrate.simpson(phi, x=grid))
        metrics["mass_error"] = abs(mass - 1.0)

        if cfg.samples > 0:
            args = [(cfg.seed, n, k, lo, hi) for lo, hi in _chunk_bounds(cfg.samples, cfg.workers)]
            values = np.concatenate(_run_chunks(_unordered_lambda_chunk, args, cfg.workers))
            edges = np.linspace(0.0, 1.0, DENSITY_HIST_BINS + 1)
            observed, _ = np.histogram(values, bins=edges)
            expected = np.empty(DENSITY_HIST_BINS)
            for i in range(DENSITY_HIST_BINS):
                val, _err = scipy.integrate.quad(
                    lambda x: math.exp(log_density_eigs(p, np.array([x, 1.0 - x]))),
                    edges[i], edges[i + 1], epsabs=1e-10, epsrel=1e-10,
                )
                expected[i] = val * cfg.samples
            report = chi_square_gof(observed.astype(float), expected)
            metrics["chi_square_p"] = report.value
            sections["hist"] = (
                ["bin_left", "bin_right", "observed", "expected"],
                [
                    (float(edges[i]), float(edges[i + 1]), int(observed[i]), float(expected[i]))
                    for i in range(DENSITY_HIST_BINS)
                ],
            )
    else:
        step = 0.005
        coords = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
        curve_rows: list[Sequence[object]] = []
        for x1 in coords:
            for x2 in coords:
                x3 = 1.0 - x1 - x2
                if x3 < -1e-12:
                    continue
                lam = np.array([x1, x2, max(x3, 0.0)])
                curve_rows.append((float(x1), float(x2), math.exp(log_density_eigs(p, lam))))
        sections["curve"] = (["lambda_1", "lambda_2", "phi"], curve_rows)
        if cfg.samples > 0:
            eigs = _collect_spectra(cfg, n, k, base=0)
            sections["draws"] = (
                ["draw", "lambda_1", "lambda_2", "lambda_3"],
                [(i, *map(float, eigs[i])) for i in range(len(eigs))],
            )
        notices.append("n = 3 emits raw simplex points; ternary rendering is external")

    return sections, metrics, notices


def cmd_moments(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    n = _single(cfg.n_list, "--n")
    k = _resolve_k(cfg, n)
    p = EnsembleParams(n, k)
    rows: list[Sequence[object]] = []
    worst = 0.0
    for q in range(1, cfg.q_max + 1):
        explicit = moment_explicit(p, q)
        recurrence = moment_recurrence(p, q)
        bridge = moment_bridge_inverted(p, q)
        spread = max(explicit, recurrence, bridge) - min(explicit, recurrence, bridge)
        rel = spread / max(abs(explicit), sys.float_info.min)
        worst = max(worst, rel)
        rows.append((q, explicit, recurrence, bridge, rel))
    sections = {"moments": (["q", "explicit", "recurrence", "wishart_bridge", "rel_discrepancy"],
                            rows)}
    return sections, {"max_rel_discrepancy": worst}, []


def cmd_mp(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    if len(cfg.n_list) > 1 and cfg.c is None:
        raise DomainError("an --n sweep needs --c so every size uses the same ratio")
    if cfg.samples < 1:
        raise DomainError("--samples must be at least 1")
    ks_rows: list[Sequence[object]] = []
    hist_section: Section | None = None
    medians: list[float] = []
    for pos, n in enumerate(cfg.n_list):
        k = _resolve_k(cfg, n)
        law = MarchenkoPastur(c=k / n)
        eigs = _collect_spectra(cfg, n, k, base=pos * cfg.samples)
        draws_ks: list[float] = []
        for i in range(len(eigs)):
            esm = EmpiricalMeasure(locations=k * eigs[i], weights=np.full(n, 1.0 / n))
            d = ks_distance(esm, lambda x: mp_cdf(x, law))
            draws_ks.append(d)
            ks_rows.append((n, k, i, d))
        medians.append(float(np.median(draws_ks)))
        if pos == len(cfg.n_list) - 1:
            edges = np.linspace(law.a - 0.1, law.b + 0.3, MP_HIST_BINS + 1)
            esm0 = EmpiricalMeasure(locations=k * eigs[0], weights=np.full(n, 1.0 / n))
            masses = histogram(esm0, edges)
            centers = 0.5 * (edges[:-1] + edges[1:])
            widths = np.diff(edges)
            hist_section = (
                ["bin_left", "bin_right", "esm_density", "mp_pdf"],
                [
                    (float(edges[i]), float(edges[i + 1]),
                     float(masses[i] / widths[i]), float(mp_pdf(centers[i], law)))
                    for i in range(MP_HIST_BINS)
                ],
            )
    sections: dict[str, Section] = {"ks": (["n", "k", "draw", "ks"], ks_rows)}
    if hist_section is not None:
        sections["hist"] = hist_section
    metrics = {"ks_median": medians[-1]}
    if len(medians) > 1:
        metrics["ks_trend_violations"] = float(
            sum(1 for a, b in zip(medians, medians[1:]) if b > a)
        )
    return sections, metrics, []


def cmd_edge(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    if cfg.samples < 100:
        raise DomainError("distributional edge output needs --samples >= 100")
    draw_rows: list[Sequence[object]] = []
    summary_rows: list[Sequence[object]] = []
    sd_t: list[float] = []
    last: tuple[EnsembleParams, np.ndarray] | None = None
    for pos, n in enumerate(cfg.n_list):
        k = _resolve_k(cfg, n)
        p = EnsembleParams(n, k)
        args = [(cfg.seed, n, k, pos * cfg.samples, lo, hi)
                for lo, hi in _chunk_bounds(cfg.samples, cfg.workers)]
        lam_max = np.concatenate(_run_chunks(_edge_chunk, args, cfg.workers))
        rescaled_loc = k * lam_max
        t = np.asarray(edge_rescale_density(lam_max, p))
        for i in range(len(lam_max)):
            draw_rows.append((n, k, i, float(lam_max[i]), float(rescaled_loc[i]), float(t[i])))
        summary_rows.append((
            n, k,
            float(rescaled_loc.mean()), float(rescaled_loc.std(ddof=1)),
            float(t.mean()), float(t.std(ddof=1)),
        ))
        sd_t.append(float(t.std(ddof=1)))
        last = (p, t)
    sections = {
        "draws": (["n", "k", "draw", "lambda_max", "cn_lambda_max", "t"], draw_rows),
        "summary": (["n", "k", "mean_cn_lambda_max", "sd_cn_lambda_max", "mean_t", "sd_t"],
                    summary_rows),
    }
    assert last is not None
    p_last, t_last = last
    c = p_last.c
    metrics = {
        "edge_mean_abs_error": abs(float(summary_rows[-1][2]) - (math.sqrt(c) + 1.0) ** 2),
    }
    if len(cfg.n_list) == 2:
        metrics["sd_ratio_deviation"] = abs(sd_t[0] / sd_t[1] - 1.0)
    notices: list[str] = []
    if cfg.tw_table:
        try:
            table = (TracyWidomTable.bundled() if cfg.tw_table == "bundled"
                     else TracyWidomTable.from_file(cfg.tw_table))
        except OSError as exc:
            raise DomainError(f"cannot read --tw-table file: {exc}") from exc
        esm = EmpiricalMeasure(locations=t_last, weights=np.full(t_last.size, 1.0 / t_last.size))
        metrics["tw_ks"] = ks_distance(esm, table.cdf)
    else:
        notices.append("tracy-widom comparison omitted (no --tw-table given)")
    return sections, metrics, notices


def cmd_firstmodel(cfg: ExperimentConfig) -> tuple[dict[str, Section], dict[str, float], list[str]]:
    n = _single(cfg.n_list, "--n")
    if not cfg.k_list:
        raise DomainError("--k takes a comma-separated list of environment dimensions")
    rows: list[Sequence[object]] = []
    entropy_sigma = 0.0
    msd_means: list[float] = []
    for pos, k in enumerate(cfg.k_list):
        if k < n:
            raise DomainError(f"first-model comparisons need k >= n, got k={k} < n={n}")
        p = EnsembleParams(n, k)
        eigs = _collect_spectra(cfg, n, k, base=pos * cfg.samples)
        msd = np.sum((eigs - 1.0 / n) ** 2, axis=1)
        entropy = np.array([von_neumann_entropy(row) for row in eigs])
        msd_mean = float(msd.mean())
        msd_se = float(msd.std(ddof=1) / math.sqrt(len(msd)))
        ent_mean = float(entropy.mean())
        ent_se = float(entropy.std(ddof=1) / math.sqrt(len(entropy)))
        alpha = k - n + 1
        page = page_entropy(p)
        sigma = abs(ent_mean - page) / ent_se if ent_se > 0.0 else 0.0
        entropy_sigma = max(entropy_sigma, sigma)
        msd_means.append(msd_mean)
        rows.append((
            k, alpha, msd_mean, msd_se, dirichlet_mean_sq_distance(n, float(alpha)),
            ent_mean, ent_se, page, math.log(n),
        ))
    sections = {
        "firstmodel": ([
            "k", "alpha", "mc_msd", "mc_msd_se", "dirichlet_msd",
            "mc_entropy", "mc_entropy_se", "page_entropy", "log_n",
        ], rows),
    }
    metrics = {"entropy_sigma": entropy_sigma}
    if len(cfg.k_list) > 1:
        metrics["msd_trend_violations"] = float(
            sum(1 for a, b in zip(msd_means, msd_means[1:]) if b > a)
        )
    return sections, metrics, []


_COMMANDS = {
    "sample": cmd_sample,
    "density": cmd_density,
    "moments": cmd_moments,
    "mp": cmd_mp,
    "edge": cmd_edge,
    "firstmodel": cmd_firstmodel,
}


# ---------------------------------------------------------------------------
# argument handling and reporting

def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdmlab",
        description="Monte Carlo and exact spectral statistics of random density matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "sample": "draw density matrices; write spectra and a moment summary",
        "density": "theoretical eigenvalue-density curve with a Monte Carlo overlay",
        "moments": "compare the exact moment routes",
        "mp": "empirical spectral measure against the Marchenko-Pastur law",
        "edge": "largest-eigenvalue location and fluctuation statistics",
        "firstmodel": "spectrum concentration and entropy against the closed forms",
    }
    defaults = {"sample": 10000, "density": 10000, "moments": 0, "mp": 1,
                "edge": 200, "firstmodel": 1000}
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--n", type=_int_list, required=True,
                        help="system dimension(s); comma-separated for sweeps")
        sp.add_argument("--k", type=_int_list, default=[],
                        help="environment dimension(s); comma-separated for firstmodel")
        sp.add_argument("--c", type=float, default=None,
                        help="aspect ratio k/n; k is rounded from c*n")
        sp.add_argument("--q-max", type=int, default=4 if name == "sample" else 10,
                        help="largest moment order")
        sp.add_argument("--samples", type=int, default=defaults[name],
                        help="number of Monte Carlo draws")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--workers", type=int, default=1,
                        help="worker processes (never changes the numbers)")
        sp.add_argument("--out", type=str, default=None,
                        help="output path prefix (default rdmlab_<command>)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--tw-table", type=str, default=None,
                        help="Tracy-Widom CDF table path, or 'bundled'")
    return parser


def _parse_thresholds(extras: list[str], parser: argparse.ArgumentParser) -> dict[str, float]:
    thresholds: dict[str, float] = {}
    i = 0
    while i < len(extras):
        token = extras[i]
        if not token.startswith("--threshold-"):
            parser.error(f"unrecognized argument: {token}")
        name = token[len("--threshold-"):]
        value: str | None = None
        if "=" in name:
            name, value = name.split("=", 1)
        elif i + 1 < len(extras):
            i += 1
            value = extras[i]
        name = name.replace("-", "_")
        if value is None:
            parser.error(f"{token} needs a value")
        try:
            thresholds[name] = float(value)
        except ValueError:
            parser.error(f"{token} needs a numeric value, got {value!r}")
        i += 1
    return thresholds


def _evaluate_checks(metrics: dict[str, float], thresholds: dict[str, float]) -> list[dict]:
    checks = []
    for name, limit in thresholds.items():
        if name not in metrics:
            raise DomainError(
                f"no metric {name!r} for this command; available: {', '.join(sorted(metrics))}"
            )
        if name not in _METRIC_SENSE:  # pragma: no cover - registry covers all metrics
            raise DomainError(f"metric {name!r} has no pass direction registered")
        value = metrics[name]
        passed = value <= limit if _METRIC_SENSE[name] == "max" else value >= limit
        checks.append({"metric": name, "value": value, "threshold": limit,
                       "sense": _METRIC_SENSE[name], "passed": passed})
    return checks


def _emit(cfg: ExperimentConfig, sections: dict[str, Section], metrics: dict[str, float],
          checks: list[dict], wall_seconds: float) -> list[Path]:
    prefix = cfg.out or f"rdmlab_{cfg.command}"
    metadata = cfg.metadata()
    metadata["wall_clock_seconds"] = wall_seconds
    written: list[Path] = []
    metric_rows = [(name, metrics[name]) for name in sorted(metrics)]
    check_rows = [
        (c["metric"], c["value"], c["threshold"], c["sense"], c["passed"]) for c in checks
    ]
    if cfg.fmt == "csv":
        for name, (header, rows) in sections.items():
            written.append(write_csv(f"{prefix}_{name}.csv", metadata, header, rows))
        written.append(write_csv(f"{prefix}_metrics.csv", metadata,
                                 ["metric", "value"], metric_rows))
        if checks:
            written.append(write_csv(f"{prefix}_checks.csv", metadata,
                                     ["metric", "value", "threshold", "sense", "passed"],
                                     check_rows))
    else:
        results: dict[str, object] = {
            name: table_payload(header, rows) for name, (header, rows) in sections.items()
        }
        results["metrics"] = dict(metric_rows)
        results["checks"] = checks
        written.append(write_json(f"{prefix}.json", metadata, results))
    return written


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    thresholds = _parse_thresholds(extras, parser)
    cfg = ExperimentConfig(
        command=args.command,
        n_list=args.n,
        k_list=args.k,
        c=args.c,
        q_max=args.q_max,
        samples=args.samples,
        seed=args.seed,
        workers=args.workers,
        out=args.out,
        fmt=args.format,
        tw_table=args.tw_table,
        thresholds=thresholds,
    )
    started = time.perf_counter()
    try:
        sections, metrics, notices = _COMMANDS[cfg.command](cfg)
        checks = _evaluate_checks(metrics, cfg.thresholds)
    except RdmLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - started
    files = _emit(cfg, sections, metrics, checks, wall)
    for notice in notices:
        print(f"note: {notice}")
    for path in files:
        print(f"wrote {path}")
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        op = "<=" if check["sense"] == "max" else ">="
        print(f"{check['metric']} = {check['value']:.6g} ({op} {check['threshold']:g}: {status})")
    return 0 if all(c["passed"] for c in checks) else 1


if __name__ == "__main__":
    raise SystemExit(main())
