"""Config-driven experiment runner and verification CLI.

Subcommands
-----------

``run --config experiment.toml``
    Assemble the configured Toeplitz matrices for every (kernel, size) cell,
    write one quantile-comparison CSV and SVG per cell and mode, run the
    requested check suites, and exit nonzero if any check fails (the failing
    suites are named on stderr).

``selftest [--seed N] [--inject-flip-error]``
    Run the full cross-module invariant suite at small sizes; one PASS/FAIL
    line per suite.  The injection flag is a negative control: it seeds a
    sign error into the circulant fiber path, which the fiber suite must
    catch.

``export-symbol --builtin NAME --out PATH``
    Write the JSON description of a built-in symbol (trig-poly tables
    round-trip exactly in decimal).

Config schema (TOML), all under ``[experiment]``::

    symbol     = "herm_cont_2x2"   # builtin, "herm_1d", or path to a symbol JSON
    kernels    = ["L", "S12", "S21", "R"]      # or {s_left=[..], s_right=[..]} tables
    sizes      = [[2, 2], [8, 8], [32, 32]]
    mode       = "eig"             # "eig" | "sv" | "both"
    output_dir = "out"             # joined under $QTOEPLITZ_OUTPUT_ROOT if relative
    grid        = 128              # symbol rearrangement grid per dimension (optional)
    sample_grid = 64               # quadrature grid for sampled symbols (optional)
    scatter     = false            # also write canonical-eigenvalue scatter CSVs
    checks      = ["embedding", "adjoint", "hermitian", "schatten",
                   "localization", "acs", "fibers"]
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .circulant import acs_truncate, acs_witness, canonical_x_form, circulant_spectrum
from .distribution import (
    DistributionReport,
    empirical_spectrum,
    localization_check,
    quantile_distance,
    scatter_canonical,
    symbol_quantiles,
    write_report_csv,
    write_scatter_csv,
)
from .qmatrix import adjoint, frobenius_norm
from .selftest import run_selftest
from .svg import write_quantile_svg
from .symbols import (
    BUILTIN_NAMES,
    KernelPartition,
    Sampled,
    SymbolSpec,
    builtin,
    demo_herm_1d,
    embedded_symbol,
    hermitian_criterion,
    parse_kernel,
    spectral_range_bounds,
    symbol_from_json,
    symbol_to_json,
)
from .toeplitz import (
    adjoint_identity_check,
    assemble,
    embedding_identity_check,
    schatten_bound_check,
)

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "run_experiment", "main"]

OUTPUT_ROOT_ENV = "QTOEPLITZ_OUTPUT_ROOT"
KNOWN_CHECKS = ("embedding", "adjoint", "hermitian", "schatten", "localization", "acs", "fibers")
EXPORTABLE = BUILTIN_NAMES + ("herm_1d",)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    symbol: str
    kernels: list
    sizes: list[tuple[int, ...]]
    mode: str = "sv"
    output_dir: str = "out"
    grid: int | None = None
    sample_grid: int | None = None
    scatter: bool = False
    checks: list[str] = field(default_factory=list)


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    exp = doc.get("experiment")
    if not isinstance(exp, dict):
        raise ConfigError("experiment: missing [experiment] table")
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(exp) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown configuration key")
    try:
        cfg = ExperimentConfig(**exp)
    except TypeError as exc:
        raise ConfigError(f"experiment: {exc}") from exc
    cfg.sizes = [tuple(int(c) for c in size) for size in cfg.sizes]
    return cfg


def resolve_symbol(token: str, sample_grid: int | None = None) -> tuple[str, SymbolSpec]:
    """Map a config symbol field to (name, spec)."""
    if token in BUILTIN_NAMES:
        spec = builtin(token) if sample_grid is None else builtin(token, grid=sample_grid)
        return token, spec
    if token == "herm_1d":
        return token, demo_herm_1d()
    path = Path(token)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"symbol: cannot read {token!r} ({exc})") from exc
        try:
            return path.stem, symbol_from_json(text)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"symbol: cannot parse {token!r} ({exc})") from exc
    raise ConfigError(
        f"symbol: {token!r} is neither a builtin ({', '.join(EXPORTABLE)}) nor a JSON file"
    )


def _validate(cfg: ExperimentConfig) -> tuple[str, SymbolSpec, list[KernelPartition], list[str]]:
    if cfg.grid is not None and cfg.grid < 8:
        raise ConfigError(f"grid: {cfg.grid} is too coarse (need >= 8)")
    if cfg.sample_grid is not None and cfg.sample_grid < 4:
        raise ConfigError(f"sample_grid: {cfg.sample_grid} is too coarse (need >= 4)")
    name, spec = resolve_symbol(cfg.symbol, cfg.sample_grid)
    if not cfg.sizes:
        raise ConfigError("sizes: must contain at least one size vector")
    for size in cfg.sizes:
        if len(size) != spec.d:
            raise ConfigError(f"sizes: {size} has {len(size)} levels, symbol has d={spec.d}")
        if any(n < 1 for n in size):
            raise ConfigError(f"sizes: {size} has entries < 1")
    try:
        kernels = [parse_kernel(k, spec.d) for k in cfg.kernels]
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"kernels: {exc}") from exc
    if not kernels:
        raise ConfigError("kernels: must contain at least one kernel class")
    if cfg.mode not in ("eig", "sv", "both"):
        raise ConfigError(f"mode: {cfg.mode!r} is not one of eig, sv, both")
    modes = ["eig", "sv"] if cfg.mode == "both" else [cfg.mode]
    if "eig" in modes:
        if spec.s != spec.t:
            raise ConfigError("mode: eig requires square blocks (s == t)")
        if not hermitian_criterion(spec).is_hermitian:
            raise ConfigError(
                "mode: eig requires a symbol passing the Hermitian criterion; "
                f"{cfg.symbol!r} fails it"
            )
    if cfg.scatter and spec.s != spec.t:
        raise ConfigError("scatter: canonical-eigenvalue scatter needs s == t")
    for check in cfg.checks:
        if check not in KNOWN_CHECKS:
            raise ConfigError(f"checks: unknown check {check!r} (choose from {KNOWN_CHECKS})")
    if "localization" in cfg.checks and not hermitian_criterion(spec).is_hermitian:
        raise ConfigError("checks: localization needs a Hermitian-criterion symbol")
    return name, spec, kernels, modes


def _cell_report(
    spec: SymbolSpec,
    kernel: KernelPartition,
    nvec: tuple[int, ...],
    mode: str,
    grid: int | None,
    bounds: tuple[float, float] | None,
    scatter: bool,
) -> DistributionReport:
    t = assemble(spec, nvec, kernel)
    emp = empirical_spectrum(t, mode)
    sym = symbol_quantiles(embedded_symbol(spec, kernel), mode, grid=grid, count=emp.size)
    return DistributionReport(
        mode=mode,
        kernel_label=kernel.label,
        nvec=nvec,
        empirical=emp,
        symbol_quantiles=sym,
        l1_quantile_distance=quantile_distance(emp, sym),
        bounds=bounds if mode == "eig" else None,
        scatter=scatter_canonical(t) if scatter else None,
    )


def _run_checks(
    cfg: ExperimentConfig,
    spec: SymbolSpec,
    kernels: list[KernelPartition],
    reports: list[DistributionReport],
) -> list[tuple[str, bool, str]]:
    results: list[tuple[str, bool, str]] = []
    small = min(cfg.sizes, key=lambda s: int(np.prod(s)))
    big = max(cfg.sizes, key=lambda s: int(np.prod(s)))
    sampled = isinstance(spec.body, Sampled)

    def add(name: str, ok: bool, detail: str) -> None:
        results.append((name, ok, detail))

    for check in cfg.checks:
        if check == "embedding":
            tol = 1e-6 if sampled else 1e-10
            worst = max(embedding_identity_check(spec, k, small) for k in kernels)
            add(check, worst < tol, f"max residual {worst:.3e} (tol {tol:.0e})")
        elif check == "adjoint":
            ok = adjoint_identity_check(spec, small)
            add(check, ok, f"identities at n={small}")
        elif check == "hermitian":
            crit = hermitian_criterion(spec).is_hermitian
            ok = True
            for k in kernels:
                t = assemble(spec, small, k)
                is_herm = frobenius_norm(t - adjoint(t)) <= 1e-8 * max(
                    1.0, frobenius_norm(t)
                )
                ok &= is_herm == crit
            add(check, ok, f"criterion={crit}, matrices agree at n={small}")
        elif check == "schatten":
            worst = 0.0
            ok = True
            for k in kernels:
                for p in (1.0, 2.0, np.inf):
                    lhs, rhs = schatten_bound_check(spec, k, small, p)
                    ok &= lhs <= rhs * (1 + 1e-12)
                    worst = max(worst, lhs / max(rhs, 1e-300))
            add(check, ok, f"max lhs/rhs ratio {worst:.3f}")
        elif check == "localization":
            ok = True
            worst = 0.0
            for report in reports:
                if report.mode != "eig" or report.bounds is None:
                    continue
                grid = cfg.grid or 128
                h = 2.0 * np.pi / grid
                scale = max(abs(report.bounds[0]), abs(report.bounds[1]), 1.0)
                slack = (h if sampled else 10.0 * h * h) * scale
                good, violation = localization_check(report, slack=slack)
                ok &= good
                worst = max(worst, violation)
            add(check, ok, f"max violation {worst:.3e}")
        elif check == "acs":
            if min(big) < 3:
                add(check, False, f"sizes too small for truncation m=1 (need n >= 3)")
                continue
            w = acs_witness(spec, big, 1)
            ok = w.rank_part <= w.rank_bound + 1e-12
            add(
                check,
                ok,
                f"m=1 n={big}: rank {w.rank_part:.4f} <= bound {w.rank_bound:.4f}, "
                f"norm {w.norm_part:.3e}",
            )
        elif check == "fibers":
            if min(big) < 3:
                add(check, False, "sizes too small for truncation m=1 (need n >= 3)")
                continue
            circ = acs_truncate(spec, big, 1)
            try:
                form = canonical_x_form(circ)
                if spec.s == spec.t:
                    circulant_spectrum(circ)
                add(check, True, f"reconstruction residual {form.residual:.3e}")
            except Exception as exc:
                add(check, False, f"{type(exc).__name__}: {exc}")
    return results


def run_experiment(cfg: ExperimentConfig, out_parent: Path | None = None) -> int:
    name, spec, kernels, modes = _validate(cfg)
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, ".")) if out_parent is None else out_parent
    out_dir = Path(cfg.output_dir)
    if not out_dir.is_absolute():
        out_dir = root / out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    bounds: dict[str, tuple[float, float]] = {}
    if "eig" in modes or "localization" in cfg.checks:
        for k in kernels:
            bounds[k.label] = spectral_range_bounds(spec, k, grid=cfg.grid)

    reports = []
    for k in kernels:
        for nvec in cfg.sizes:
            for mode in modes:
                report = _cell_report(
                    spec, k, nvec, mode, cfg.grid, bounds.get(k.label), cfg.scatter
                )
                reports.append(report)
                stem = f"{name}_{k.label}_{'x'.join(map(str, nvec))}_{mode}"
                write_report_csv(report, out_dir / f"{stem}.csv")
                write_quantile_svg(
                    report,
                    out_dir / f"{stem}.svg",
                    title=f"{name} {k.label} n={'x'.join(map(str, nvec))} ({mode})",
                )
                if report.scatter is not None:
                    write_scatter_csv(report.scatter, out_dir / f"{stem}_scatter.csv")
                print(
                    f"{stem}: quantile distance {report.l1_quantile_distance:.6f}"
                )

    failures = []
    for check, ok, detail in _run_checks(cfg, spec, kernels, reports):
        print(f"{'PASS' if ok else 'FAIL'} check {check}: {detail}")
        if not ok:
            failures.append(check)
    if failures:
        print(f"failed checks: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        return run_experiment(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def _cmd_selftest(args) -> int:
    results = run_selftest(seed=args.seed, inject_flip_error=args.inject_flip_error)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} - {r.detail}")
    if failed:
        print(
            f"failed suites: {', '.join(r.name for r in failed)}", file=sys.stderr
        )
        return 1
    print(f"all {len(results)} suites passed")
    return 0


def _cmd_export_symbol(args) -> int:
    if args.builtin not in EXPORTABLE:
        print(
            f"unknown builtin {args.builtin!r}; choose from {', '.join(EXPORTABLE)}",
            file=sys.stderr,
        )
        return 2
    spec = demo_herm_1d() if args.builtin == "herm_1d" else builtin(args.builtin, grid=args.grid)
    Path(args.out).write_text(symbol_to_json(spec))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtoeplitz",
        description="quaternion block Toeplitz/circulant spectral experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a config-driven experiment")
    p_run.add_argument("--config", required=True, help="path to the TOML config")
    p_run.set_defaults(fn=_cmd_run)

    p_self = sub.add_parser("selftest", help="run the cross-module invariant suites")
    p_self.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    p_self.add_argument(
        "--inject-flip-error",
        action="store_true",
        help="negative control: seed a sign error the fiber suite must catch",
    )
    p_self.set_defaults(fn=_cmd_selftest)

    p_exp = sub.add_parser("export-symbol", help="write a builtin symbol as JSON")
    p_exp.add_argument("--builtin", required=True, help=f"one of {', '.join(EXPORTABLE)}")
    p_exp.add_argument("--out", required=True, help="output path")
    p_exp.add_argument("--grid", type=int, default=64, help="quadrature grid per dimension")
    p_exp.set_defaults(fn=_cmd_export_symbol)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
