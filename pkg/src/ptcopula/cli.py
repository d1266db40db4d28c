"""Command-line interface: ``simulate``, ``fit``, ``diagnose`` and ``sample``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import estimation
from .config import ConfigError, load_config
from .copulas import FAMILIES, CopulaModel, empirical_chi, stdf_estimate
from .gpd_copula import GpdCopulaSpec, sample_gpd_copula
from .loss_model import PlainJoint, PtJoint, build_margins, simulate_joint_losses
from .piecing_together import PtCopulaSpec, sample_pt_copula
from .presets import COMMERCIAL, RETAIL
from .risk import replicate_report
from .streams import JOINT, as_generator, substream


class CliError(Exception):
    pass


def format_float(x: float) -> str:
    return "%.17g" % x


def write_matrix(rows: np.ndarray, header: list[str], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in np.asarray(rows, dtype=float):
        writer.writerow([format_float(v) for v in row])


def read_column(path: str) -> np.ndarray:
    """Single numeric column; a non-numeric first row is taken as a header."""
    values = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if i == 0:
                    continue
                raise CliError(f"{path}:{i + 1}: not a number: {row[0]!r}") from None
    return np.array(values)


def _floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _copula_from_args(args, family: str) -> CopulaModel:
    try:
        if family == "independence":
            return CopulaModel.independence(args.dim)
        if family == "gaussian":
            return CopulaModel.gaussian(_need(args.rho, "--rho"), dim=args.dim)
        if family == "t":
            return CopulaModel.student_t(_need(args.rho, "--rho"), _need(args.nu, "--nu"), dim=args.dim)
        return CopulaModel(family, args.dim, theta=_need(args.theta, "--theta"))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _need(value, flag):
    if value is None:
        raise CliError(f"{flag} is required for this copula family")
    return value


def _add_copula_flags(p: argparse.ArgumentParser, name: str = "--family") -> None:
    p.add_argument(name, "--base", dest="family", choices=FAMILIES, default="independence")
    p.add_argument("--rho", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--dim", type=int, default=2)


# subcommands


def cmd_simulate(args) -> int:
    run = load_config(args.config, seed_override=args.seed)
    scenario = run.scenario
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    margins = build_margins(scenario, threads=args.threads)
    reports = {"risk_report": replicate_report(scenario, run.reps, threads=args.threads, margins=margins)}
    if args.compare and isinstance(scenario.joint, PtJoint):
        plain = scenario.with_joint(PlainJoint(scenario.joint.base))
        reports["risk_report_plain"] = replicate_report(plain, run.reps, threads=args.threads, margins=margins)
    for stem, report in reports.items():
        (out / f"{stem}.csv").write_text(report.to_csv(), newline="")
        (out / f"{stem}.json").write_text(json.dumps(report.metadata(), indent=2) + "\n")
    if args.emit_samples:
        losses = simulate_joint_losses(scenario, substream(scenario.seed, JOINT, 0), margins)
        header = [line.name for line in scenario.lines] + ["total"]
        with open(out / "samples.csv", "w", newline="") as fh:
            write_matrix(losses, header, fh)
    print(f"wrote {', '.join(sorted(str(p.name) for p in out.iterdir()))} to {out}")
    return 0


def cmd_fit(args) -> int:
    data = read_column(args.input)
    if args.kind == "gpd":
        if args.threshold is None:
            raise CliError("gpd fitting needs --threshold")
        excess = data[data > args.threshold] - args.threshold
        fit = estimation.fit_gpd_mle(excess)
        params = {"threshold": args.threshold, "n_excesses": excess.size, "beta": fit.beta, "xi": fit.xi}
    elif args.kind == "lognormal":
        fit = estimation.fit_lognormal_mle(data)
        params = {"mu": fit.mu, "sigma": fit.sigma}
    else:
        fit = estimation.fit_negbin_moments(data)
        params = {"alpha": fit.alpha, "r": fit.r}
    for key, value in params.items():
        print(f"{key} = {value if isinstance(value, int) else format_float(value)}")
    return 0


def cmd_diagnose(args) -> int:
    out = sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    if args.kind == "mean-excess":
        if args.input is None or args.thresholds is None:
            raise CliError("mean-excess needs --input and --thresholds")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            curve = estimation.mean_excess(read_column(args.input), args.thresholds, args.min_exceedances)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        writer.writerow(["threshold", "mean_excess", "count"])
        for t, e, k in zip(curve.thresholds, curve.mean_excess, curve.counts):
            writer.writerow([format_float(t), format_float(e), int(k)])
        return 0
    copula = _copula_from_args(args, args.family)
    if args.kind == "chi":
        sample = copula.sample(args.n, as_generator(args.seed))
        writer.writerow(["level", "chi"])
        for level in args.levels:
            writer.writerow([format_float(level), format_float(empirical_chi(sample, args.i, args.j, level))])
        return 0
    x = args.x if args.x is not None else [-1.0] * copula.dim
    if len(x) != copula.dim:
        raise CliError(f"--x needs {copula.dim} components")
    writer.writerow(["t", "stdf"])
    for t in args.t:
        writer.writerow([format_float(t), format_float(stdf_estimate(copula, x, t))])
    return 0


def _default_threshold(dim: int) -> np.ndarray:
    if dim != 2:
        raise CliError("--y is required outside the two-line default")
    return np.array([COMMERCIAL.severity.body_mass - 1.0, RETAIL.severity.body_mass - 1.0])


def cmd_sample(args) -> int:
    rng = as_generator(args.seed)
    base = _copula_from_args(args, args.family)
    if args.pt or args.gpd:
        s_copula = CopulaModel.gaussian(args.gpd_rho, dim=args.dim) if args.gpd_rho > 0 else CopulaModel.independence(args.dim)
        gpd = GpdCopulaSpec(s_copula)
    if args.pt:
        y = np.array(args.y) if args.y is not None else _default_threshold(args.dim)
        try:
            spec = PtCopulaSpec(base, gpd, y)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        rows = sample_pt_copula(spec, args.n, rng).shifted
    elif args.gpd:
        rows = sample_gpd_copula(gpd, args.n, rng) + 1.0
    else:
        rows = base.sample(args.n, rng)
    write_matrix(rows, [f"u{i + 1}" for i in range(rows.shape[1] if rows.ndim == 2 else args.dim)], sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptcopula", description="Piecing-together copula simulation of compound losses")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="replicated joint loss simulation and risk report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--emit-samples", action="store_true", help="also write samples.csv from replication 0")
    p.add_argument("--compare", action="store_true", help="with [pt] enabled, also report the plain base copula")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a severity or frequency model to a CSV column")
    p.add_argument("kind", choices=("gpd", "lognormal", "negbin"))
    p.add_argument("input")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("diagnose", help="mean excess, tail dependence or stable tail dependence diagnostics")
    p.add_argument("kind", choices=("mean-excess", "chi", "stdf"))
    p.add_argument("--input")
    p.add_argument("--thresholds", type=_floats)
    p.add_argument("--min-exceedances", type=int, default=5)
    _add_copula_flags(p)
    p.add_argument("-n", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=_floats, default=[0.9, 0.95, 0.99])
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--x", type=_floats)
    p.add_argument("--t", type=_floats, default=[0.01, 0.001])
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("sample", help="sample a copula, GPD copula or pieced-together copula")
    _add_copula_flags(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--pt", action="store_true")
    mode.add_argument("--gpd", action="store_true")
    p.add_argument("--gpd-rho", type=float, default=0.7)
    p.add_argument("--y", type=_floats, help="threshold on [-1, 0]^m for --pt")
    p.add_argument("-n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
            raise CliError("-n must be non-negative")
        return args.func(args)
    except (CliError, ConfigError, ValueError, OSError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
