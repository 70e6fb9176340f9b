"""Command-line front end.

Three subcommands:

``pxy estimate``
    Point estimates and four bootstrap confidence intervals per requested
    estimator, from a two-column CSV (``--input``) or a freshly simulated
    sinh-arcsinh sample (``--simulate``).  Reports render as a text table,
    CSV, or JSON; ``--export-replicates`` additionally writes, per
    estimator, a CSV of bootstrap replicate values and a kernel-smoothed
    density curve of those replicates (512-point grid) for plotting.

``pxy simulate``
    Write a simulated paired sample as CSV (header ``x,y``, 17-significant-
    digit values so re-ingestion reproduces the sample exactly).

``pxy oracle``
    Print the numerically integrated true theta, the independence-baseline
    theta, and the Pearson correlation for given parameters.

Seed discipline: bootstrap replicate r consumes stream r (retries move to
streams r + attempt*B), while simulated data is drawn from the reserved
stream index 2^64 - 1 so data generation never shares a stream with the
bootstrap.  Output bytes are a pure function of (inputs, flags, seed);
``--threads`` changes wall time only.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .bootstrap import (
    CiKind,
    ConfidenceInterval,
    ci_basic,
    ci_bca,
    ci_normal,
    ci_percentile,
    default_scheme,
    jackknife_estimates,
    run_bootstrap,
)
from .core import (
    DataFormatError,
    DegenerateSampleError,
    DomainError,
    InsufficientDataError,
    Method,
    NonConvergenceError,
    PairedSample,
    PxyError,
    Seed,
)
from .estimators import EstimatorSpec
from .kernels import silverman_density_bw
from .numerics import RngStream
from .simulate import (
    SinhArcsinhParams,
    correlation_oracle,
    sample_sas,
    theta_independent_oracle,
    theta_oracle,
)

__all__ = [
    "RunConfig",
    "ReportRow",
    "ThetaReport",
    "ingest_csv",
    "estimate_command",
    "simulate_command",
    "oracle_command",
    "main",
]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

#: Stream reserved for data simulation; bootstrap uses streams < 101 * B.
DATA_STREAM_INDEX = 2**64 - 1

_DEFAULT_PARAMS = "1,1,0.75,0,1,1,2"
_ALL_METHODS = tuple(Method)
_ORACLE_THETA_TOL = 1e-8
_ORACLE_CORR_TOL = 1e-6


class UsageError(PxyError):
    """Bad flags or inconsistent configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Everything the estimate pipeline needs, validated up front."""

    input_path: str | None
    simulate: bool
    params: SinhArcsinhParams
    n: int
    estimators: tuple[Method, ...]
    b: int
    level: float
    seed: Seed
    threads: int
    fmt: str
    export_replicates: bool
    out: str | None

    def __post_init__(self) -> None:
        if (self.input_path is None) == (not self.simulate):
            raise UsageError("exactly one of --input and --simulate is required")
        if not self.estimators:
            raise UsageError("at least one estimator must be selected")
        if self.b < 1:
            raise UsageError(f"--B must be >= 1, got {self.b}")
        if not 0.0 < self.level < 1.0:
            raise UsageError(f"--level must be in (0, 1), got {self.level}")
        if self.n < 2:
            raise UsageError(f"--n must be >= 2, got {self.n}")
        if self.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {self.threads}")
        if self.fmt not in ("text", "csv", "json"):
            raise UsageError(f"--format must be text, csv or json, got {self.fmt}")


@dataclass(frozen=True)
class ReportRow:
    """One estimator's results; ``error`` set means the other fields are None."""

    method: Method
    point: float | None
    normal: ConfidenceInterval | None
    basic: ConfidenceInterval | None
    percentile: ConfidenceInterval | None
    bca: ConfidenceInterval | None
    error: str | None = None


@dataclass(frozen=True)
class ThetaReport:
    rows: tuple[ReportRow, ...]
    n: int
    b: int
    level: float
    seed: Seed


def ingest_csv(path: str) -> PairedSample:
    """Read a two-column numeric CSV as a paired sample.

    A single non-numeric first row is treated as a header.  Errors name
    the offending 1-based row.  Values must be finite.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]  # drop blank lines
    if not rows:
        raise InsufficientDataError(f"{path}: empty file")
    start = 0
    if not _is_numeric_row(rows[0]):
        start = 1
    xs, ys = [], []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if len(row) != 2:
            raise DataFormatError(
                f"{path}: row {lineno} has {len(row)} columns, expected 2"
            )
        pair = []
        for cell in row:
            try:
                value = float(cell.strip())
            except ValueError:
                raise DataFormatError(
                    f"{path}: row {lineno}: cannot parse {cell.strip()!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise DataFormatError(
                    f"{path}: row {lineno}: non-finite value {cell.strip()!r}"
                )
            pair.append(value)
        xs.append(pair[0])
        ys.append(pair[1])
    if len(xs) < 2:
        raise InsufficientDataError(f"{path}: need at least 2 data rows, got {len(xs)}")
    return PairedSample(np.array(xs), np.array(ys))


def _is_numeric_row(row) -> bool:
    if len(row) != 2:
        return False
    try:
        float(row[0].strip())
        float(row[1].strip())
        return True
    except ValueError:
        return False


def _acquire_sample(cfg: RunConfig) -> PairedSample:
    if cfg.input_path is not None:
        return ingest_csv(cfg.input_path)
    return sample_sas(cfg.params, cfg.n, RngStream(cfg.seed, DATA_STREAM_INDEX))


def estimate_command(cfg: RunConfig) -> ThetaReport:
    """Run every requested estimator and assemble the report.

    Per-estimator failures become error rows; the remaining rows are
    unaffected.  With ``export_replicates`` the bootstrap replicates and a
    kernel density curve of them are written next to the report (stem from
    ``--out``, or ``pxy`` when reporting to stdout).
    """
    sample = _acquire_sample(cfg)
    rows = []
    for method in cfg.estimators:
        spec = EstimatorSpec(method)
        try:
            result = run_bootstrap(
                sample, spec, default_scheme(method), cfg.b, cfg.seed,
                threads=cfg.threads,
            )
            jack = jackknife_estimates(sample, spec)
            row = ReportRow(
                method=method,
                point=result.point.value,
                normal=ci_normal(result, cfg.level),
                basic=ci_basic(result, cfg.level),
                percentile=ci_percentile(result, cfg.level),
                bca=ci_bca(result, jack, cfg.level),
            )
            if cfg.export_replicates:
                _write_exports(cfg, method, result.replicates)
        except PxyError as exc:
            row = ReportRow(method, None, None, None, None, None, error=str(exc))
        rows.append(row)
    return ThetaReport(tuple(rows), sample.n, cfg.b, cfg.level, cfg.seed)


def _export_stem(cfg: RunConfig) -> str:
    if cfg.out:
        stem, _ = os.path.splitext(cfg.out)
        return stem
    return "pxy"


def _write_exports(cfg: RunConfig, method: Method, replicates: np.ndarray) -> None:
    stem = _export_stem(cfg)
    rep_path = f"{stem}_{method.value}_replicates.csv"
    with open(rep_path, "w", encoding="utf-8") as fh:
        fh.write("replicate_index,theta\n")
        for r, value in enumerate(replicates):
            fh.write(f"{r},{_full(value)}\n")
    try:
        h = silverman_density_bw(replicates).h
    except (DegenerateSampleError, InsufficientDataError):
        print(
            f"note: replicates for {method.value} have no spread; "
            "density curve not written",
            file=sys.stderr,
        )
        return
    grid = np.linspace(replicates.min() - 3.0 * h, replicates.max() + 3.0 * h, 512)
    dens = np.exp(-0.5 * ((grid[:, None] - replicates[None, :]) / h) ** 2)
    dens = dens.sum(axis=1) / (replicates.size * h * math.sqrt(2.0 * math.pi))
    den_path = f"{stem}_{method.value}_density.csv"
    with open(den_path, "w", encoding="utf-8") as fh:
        fh.write("grid_z,density\n")
        for g, d in zip(grid, dens):
            fh.write(f"{_full(g)},{_full(d)}\n")


def simulate_command(params: SinhArcsinhParams, n: int, seed: Seed,
                     out_path: str | None) -> str:
    """Generate a sample and return it as CSV text (also writes ``out_path``
    when given).  Values carry 17 significant digits and round-trip exactly."""
    if n < 2:
        raise UsageError(f"--n must be >= 2, got {n}")
    sample = sample_sas(params, n, RngStream(seed, DATA_STREAM_INDEX))
    buf = io.StringIO()
    buf.write("x,y\n")
    for x, y in zip(sample.x, sample.y):
        buf.write(f"{_full(x)},{_full(y)}\n")
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def oracle_command(params: SinhArcsinhParams) -> str:
    """Format the three ground-truth values with the tolerances used."""
    theta = theta_oracle(params, _ORACLE_THETA_TOL)
    indep = theta_independent_oracle(params, _ORACLE_THETA_TOL)
    corr = correlation_oracle(params, _ORACLE_CORR_TOL)
    return (
        f"theta              = {theta:.6f}  (abs tol {_ORACLE_THETA_TOL:g})\n"
        f"theta_independent  = {indep:.6f}  (abs tol {_ORACLE_THETA_TOL:g})\n"
        f"correlation        = {corr:.6f}  (abs tol {_ORACLE_CORR_TOL:g})\n"
    )


def _full(v: float) -> str:
    """Full-precision decimal: 17 significant digits round-trip any double."""
    return f"{v:.17g}"


def _fmt3(v: float) -> str:
    return f"{v:.3f}"


def _ci_text(ci: ConfidenceInterval | None) -> str:
    if ci is None:
        return "-"
    mark = "*" if ci.outside_unit else ""
    return f"[{_fmt3(ci.lo)}, {_fmt3(ci.hi)}]{mark}"


def render_text(report: ThetaReport) -> str:
    headers = ["Method", "Point", "Normal", "Basic", "Percentile", "BCa"]
    body = []
    flagged = False
    for row in report.rows:
        if row.error is not None:
            body.append([row.method.label, "error: " + row.error, "", "", "", ""])
            continue
        cells = [
            row.method.label,
            _fmt3(row.point),
            _ci_text(row.normal),
            _ci_text(row.basic),
            _ci_text(row.percentile),
            _ci_text(row.bca),
        ]
        flagged = flagged or any(
            ci is not None and ci.outside_unit
            for ci in (row.normal, row.basic, row.percentile, row.bca)
        )
        body.append(cells)
    widths = [
        max(len(headers[c]), *(len(r[c]) for r in body)) if body else len(headers[c])
        for c in range(len(headers))
    ]
    lines = [
        f"theta = P(X < Y)   n={report.n}  B={report.b}  "
        f"level={report.level:g}  seed={report.seed.value}",
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for cells in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    if flagged:
        lines.append("* endpoint outside [0, 1]")
    return "\n".join(lines) + "\n"


_CI_FIELDS = ("normal", "basic", "percentile", "bca")


def render_csv(report: ThetaReport) -> str:
    cols = ["method", "point"]
    for name in _CI_FIELDS:
        cols += [f"{name}_lo", f"{name}_hi"]
    cols += ["outside_unit", "accel_zeroed", "error"]
    lines = [",".join(cols)]
    for row in report.rows:
        if row.error is not None:
            cells = [row.method.value] + [""] * (len(cols) - 2) + [row.error]
        else:
            cis = [getattr(row, name) for name in _CI_FIELDS]
            cells = [row.method.value, _full(row.point)]
            for ci in cis:
                cells += [_full(ci.lo), _full(ci.hi)]
            cells.append(str(any(ci.outside_unit for ci in cis)).lower())
            cells.append(str(row.bca.accel_zeroed).lower())
            cells.append("")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json(report: ThetaReport) -> str:
    def ci_dict(ci: ConfidenceInterval):
        return {
            "lo": ci.lo,
            "hi": ci.hi,
            "level": ci.level,
            "outside_unit": ci.outside_unit,
            "accel_zeroed": ci.accel_zeroed,
        }

    payload = {
        "n": report.n,
        "b": report.b,
        "level": report.level,
        "seed": report.seed.value,
        "rows": [
            {
                "method": row.method.value,
                "error": row.error,
                "point": row.point,
                **(
                    {name: ci_dict(getattr(row, name)) for name in _CI_FIELDS}
                    if row.error is None
                    else {}
                ),
            }
            for row in report.rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


_RENDERERS = {"text": render_text, "csv": render_csv, "json": render_json}


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns exit codes."""

    def error(self, message):
        raise UsageError(message)


def _parse_params(text: str) -> SinhArcsinhParams:
    parts = text.split(",")
    if len(parts) != 7:
        raise UsageError(
            "--params needs 7 comma-separated values "
            "(sigma1,sigma2,rho,eps1,eps2,delta1,delta2)"
        )
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"--params: {exc}") from None
    try:
        return SinhArcsinhParams(*vals)
    except DomainError as exc:
        raise UsageError(f"--params: {exc}") from None


def _parse_estimators(text: str) -> tuple[Method, ...]:
    if text.strip().lower() == "all":
        return _ALL_METHODS
    methods = []
    for token in text.split(","):
        token = token.strip().lower()
        try:
            methods.append(Method(token))
        except ValueError:
            valid = ", ".join(m.value for m in Method)
            raise UsageError(
                f"unknown estimator {token!r}; choose from: all, {valid}"
            ) from None
    return tuple(methods)


def _parse_seed(value: str) -> Seed:
    try:
        return Seed(int(value))
    except (ValueError, DomainError) as exc:
        raise UsageError(f"--seed: {exc}") from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="pxy", description="Estimate theta = P(X < Y) from paired samples.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="point estimates + bootstrap CIs")
    est.add_argument("--input", help="two-column CSV of paired observations")
    est.add_argument("--simulate", action="store_true",
                     help="draw the sample from the sinh-arcsinh simulator instead")
    est.add_argument("--params", default=_DEFAULT_PARAMS,
                     help="sigma1,sigma2,rho,eps1,eps2,delta1,delta2 "
                          f"(default {_DEFAULT_PARAMS})")
    est.add_argument("--n", type=int, default=100, help="simulated sample size")
    est.add_argument("--estimators", default="all",
                     help="comma list: ecdf,kernel1d,mle1d,smle1d,kernel2d,"
                          "independent,paired or 'all'")
    est.add_argument("--B", type=int, default=2000, dest="b",
                     help="bootstrap replicates (default 2000)")
    est.add_argument("--level", type=float, default=0.95,
                     help="confidence level (default 0.95)")
    est.add_argument("--seed", default="0", help="root RNG seed")
    est.add_argument("--threads", type=int, default=None,
                     help="bootstrap worker threads (default: machine parallelism)")
    est.add_argument("--format", default="text", dest="fmt",
                     choices=["text", "csv", "json"])
    est.add_argument("--export-replicates", action="store_true",
                     help="write per-estimator replicate and density CSVs")
    est.add_argument("--out", help="write the report here instead of stdout")

    sim = sub.add_parser("simulate", help="write a simulated paired sample as CSV")
    sim.add_argument("--params", default=_DEFAULT_PARAMS)
    sim.add_argument("--n", type=int, default=100)
    sim.add_argument("--seed", default="0")
    sim.add_argument("--out", help="output CSV path (default: stdout)")

    orc = sub.add_parser("oracle", help="print numerically integrated ground truths")
    orc.add_argument("--params", default=_DEFAULT_PARAMS)
    return parser


def _run(args) -> int:
    if args.command == "simulate":
        text = simulate_command(
            _parse_params(args.params), args.n, _parse_seed(args.seed), args.out
        )
        if not args.out:
            sys.stdout.write(text)
        return EXIT_OK
    if args.command == "oracle":
        sys.stdout.write(oracle_command(_parse_params(args.params)))
        return EXIT_OK
    cfg = RunConfig(
        input_path=args.input,
        simulate=args.simulate,
        params=_parse_params(args.params),
        n=args.n,
        estimators=_parse_estimators(args.estimators),
        b=args.b,
        level=args.level,
        seed=_parse_seed(args.seed),
        threads=args.threads if args.threads is not None else (os.cpu_count() or 1),
        fmt=args.fmt,
        export_replicates=args.export_replicates,
        out=args.out,
    )
    report = estimate_command(cfg)
    rendered = _RENDERERS[cfg.fmt](report)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        print(f"pxy: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, InsufficientDataError) as exc:
        print(f"pxy: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"pxy: i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NonConvergenceError, DegenerateSampleError, DomainError) as exc:
        print(f"pxy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PxyError as exc:
        print(f"pxy: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
