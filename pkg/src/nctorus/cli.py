"""Command-line driver: ``nctorus run`` executes verification suites, ``nctorus sweep`` prints obstruction orders."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Sequence

from .suites import SUITES, ConfigError, EngineConfig, Obstruction, VerificationReport, report_dict, run_suite, sweep

SCHEMA_VERSION = "nctorus.report/1"
CSV_HEADER = ("check_id", "anchor", "defect", "tolerance", "passed", "parameters", "wall_time")
ENV_PREFIX = "NCTORUS_"


def parse_theta(spec: str) -> tuple:
    """'1,0.5,-0.25+1j' -> hbar coefficients of theta, starting at hbar^1."""
    try:
        vals = tuple(complex(tok.strip().replace(" ", "")) for tok in spec.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad theta spec {spec!r}: {exc}") from None
    if not vals:
        raise ConfigError("theta spec is empty")
    return tuple(v.real if v.imag == 0 else v for v in vals)


def emit(reports: Sequence[VerificationReport], format: str = "json", timings: bool = False) -> bytes:
    reports = sorted(reports, key=lambda r: r.check_id)
    rows = [report_dict(r, timings) for r in reports]
    if format == "json":
        doc = {"schema": SCHEMA_VERSION, "reports": rows}
        return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r["check_id"], r["anchor"], f"{r['defect']:.3g}", f"{r['tolerance']:g}",
                        "PASS" if r["passed"] else "FAIL", json.dumps(r["parameters"], sort_keys=True),
                        f"{r['wall_time']:.3g}" if timings else ""])
        return buf.getvalue().encode()
    if format == "text":
        if not rows:
            return b"no checks\n"
        width = max(len(r["check_id"]) for r in rows)
        lines = []
        for r in rows:
            line = f"{'PASS' if r['passed'] else 'FAIL'}  {r['check_id']:<{width}}  {r['defect']:9.3g} <= {r['tolerance']:g}"
            if timings:
                line += f"  {r['wall_time']:.2f}s"
            lines.append(line)
        npass = sum(r["passed"] for r in rows)
        lines.append(f"{npass}/{len(rows)} checks passed")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown format {format!r}")


def emit_sweep(obs: Sequence[Obstruction], format: str = "text") -> bytes:
    rows = [{"obstruction": o.name, "leading_order": o.leading_order,
             "profile": [float(f"{v:.3g}") for v in o.profile]} for o in obs]
    if format == "json":
        return (json.dumps({"schema": SCHEMA_VERSION, "sweep": rows}, indent=2) + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("obstruction", "leading_order", "profile"))
        for r in rows:
            w.writerow([r["obstruction"], "" if r["leading_order"] is None else r["leading_order"],
                        " ".join(f"{v:.3g}" for v in r["profile"])])
        return buf.getvalue().encode()
    width = max((len(r["obstruction"]) for r in rows), default=0)
    lines = []
    for r in rows:
        lo = "none" if r["leading_order"] is None else f"hbar^{r['leading_order']}"
        lines.append(f"{r['obstruction']:<{width}}  {lo:>7}  " + " ".join(f"{v:8.2g}" for v in r["profile"]))
    return ("\n".join(lines) + "\n").encode()


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name, default)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=int(_env("ORDER", 4)), help="truncation order N")
    common.add_argument("--tol-symbolic", type=float, default=float(_env("TOL_SYMBOLIC", 1e-10)))
    common.add_argument("--tol-analytic", type=float, default=float(_env("TOL_ANALYTIC", 1e-8)))
    common.add_argument("--seed", type=int, default=int(_env("SEED", 0)))
    common.add_argument("--samples", type=int, default=int(_env("SAMPLES", 20)), help="sample points")
    common.add_argument("--term-cap", type=int, default=int(_env("TERM_CAP", 10_000)))
    common.add_argument("--theta", default=_env("THETA", "1"),
                        help="comma list of hbar-coefficients of theta, e.g. '1,0,0.5+0.1j'")
    common.add_argument("--format", choices=("json", "csv", "text"), default=_env("FORMAT", "text"))
    p = argparse.ArgumentParser(prog="nctorus", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run verification suites")
    run.add_argument("--suite", default=_env("SUITE", "all"), choices=SUITES + ("all",))
    run.add_argument("--timings", action="store_true", help="include wall time per check")
    sub.add_parser("sweep", parents=[common], help="leading hbar-order of each obstruction")
    return p


def _config(args) -> EngineConfig:
    return EngineConfig(order=args.order, tol_symbolic=args.tol_symbolic, tol_analytic=args.tol_analytic,
                        samples=args.samples, seed=args.seed, term_cap=args.term_cap,
                        theta=parse_theta(args.theta), format=args.format)


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        config = _config(args)
    except (ConfigError, ValueError) as exc:
        print(f"nctorus: error: {exc}", file=sys.stderr)
        return 2
    out = sys.stdout.buffer
    if args.command == "sweep":
        out.write(emit_sweep(sweep(config), config.format))
        out.flush()
        return 0
    reports = run_suite(args.suite, config)
    out.write(emit(reports, config.format, args.timings))
    out.flush()
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
