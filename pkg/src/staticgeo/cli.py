"""Scenario-driven command line: run constructions, probes, audits, expansions.

Exit codes: 0 when every check passes (or the command has no verdict),
2 when a verdict fails (including the designed failure of a multi-class
probe or a flagged audit), 1 on any input error.  CSV artifacts are only
written after the whole computation succeeds, so an input error never
leaves a partial table behind.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import ParameterError, StaticGeoError
from .geometry import build_case
from .profile import OdeSpec
from .rational import Polynomial, RootFactorization, partial_fractions
from .report import render_plot, write_audit_csv, write_profile_csv, write_report_csv
from .scenario import Scenario, _parse_int_list, _parse_rational_list, load_scenario
from .search import AuditReport, coefficient_audit, probe_model, probe_report
from .verify import verify


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def expand_table(roots, multiplicities, numerator: str) -> str:
    """Exact partial-fraction table: linear part, constant, one row per (l, t)."""
    if len(roots) != len(multiplicities):
        raise ParameterError(
            f"{len(roots)} roots but {len(multiplicities)} multiplicities"
        )
    factorization = RootFactorization(zip(roots, multiplicities))
    if numerator == "one":
        top = Polynomial.one()
    elif numerator == "Q":
        top = factorization.expand().antiderivative()
    else:
        raise ParameterError(f"numerator selector must be 'one' or 'Q', got {numerator!r}")
    expansion = partial_fractions(top, factorization)
    lines = [f"linear {expansion.linear_coeff}", f"const {expansion.const_coeff}"]
    for term in sorted(expansion.terms, key=lambda t: (t.root_index, t.power)):
        lines.append(f"term[{term.root_index},{term.power}] {term.coeff}")
    return "\n".join(lines)


def audit_text(report: AuditReport) -> str:
    lines = [
        f"m = {report.m}",
        f"alpha = {report.alpha}",
        f"path = {'R=0' if report.R_is_zero else 'R!=0'}",
    ]
    for r in report.records:
        verdict = "VIOLATED" if r.violated else "holds"
        lines.append(
            f"class {r.class_index} (shift {r.shift}, multiplicity {r.multiplicity}) "
            f"{r.condition}: {r.value} {verdict}"
        )
    lines.append(f"overall = {'VIOLATION' if report.any_violation else 'CLEAN'}")
    return "\n".join(lines)


def run_scenario(scenario: Scenario) -> int:
    """Execute one parsed scenario; returns the process exit code."""
    if scenario.command == "expand":
        print(expand_table(scenario.roots, scenario.multiplicities, scenario.numerator))
        return 0

    if scenario.command == "audit":
        audit = coefficient_audit(
            scenario.n, scenario.R, scenario.c_list, scenario.multiplicities
        )
        scenario.out_dir.mkdir(parents=True, exist_ok=True)
        write_audit_csv(scenario.out_dir / "audit.csv", audit)
        print(audit_text(audit))
        return 2 if audit.any_violation else 0

    grid = scenario.grid
    s_range = (grid.s_min, grid.s_max)
    if scenario.command == "probe":
        model = probe_model(
            scenario.n,
            scenario.R,
            scenario.a,
            scenario.c_list,
            scenario.init,
            s_range,
            grid.step,
        )
        report = probe_report(model, scenario.thresholds)
    else:
        spec = OdeSpec(
            case=scenario.family,
            n=scenario.n,
            R=scenario.R,
            a=scenario.a,
            k=scenario.k,
            c2=scenario.c2,
            c_list=scenario.c_list,
        )
        model = build_case(
            spec,
            scenario.init,
            s_range,
            grid.step,
            fibers=scenario.fibers,
            product_scale=scenario.product_scale,
            f_scale=scenario.f_scale,
            k2=scenario.k2,
        )
        report = verify(model, scenario.thresholds) if scenario.command == "verify" else None

    # Everything that can raise has run; now touch the filesystem.
    scenario.out_dir.mkdir(parents=True, exist_ok=True)
    write_profile_csv(scenario.out_dir / "profile.csv", model)
    if report is not None:
        write_report_csv(scenario.out_dir / "report.csv", report)
    if scenario.plot:
        render_plot(scenario.out_dir / "plot.svg", model, report, title=scenario.name)

    if model.profile.truncated:
        lo, hi = model.profile.reached
        req = model.profile.requested
        print(
            f"truncated: reached [{lo:.17g}, {hi:.17g}] "
            f"of requested [{req[0]:.17g}, {req[1]:.17g}]",
            file=sys.stderr,
        )

    if report is None:
        return 0
    print(report.to_text())
    return 0 if report.passed else 2


def _run_path(path: Path) -> int:
    try:
        return run_scenario(load_scenario(path))
    except (StaticGeoError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _run_quietly(path_str: str) -> tuple[str, int, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = _run_path(Path(path_str))
    return Path(path_str).name, code, err.getvalue()


def run_batch(directory: Path, jobs: int) -> int:
    paths = sorted(directory.glob("*.scenario"))
    if not paths:
        raise ParameterError(f"no *.scenario files in {directory}")
    if jobs <= 1:
        results = [_run_quietly(str(p)) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_quietly, [str(p) for p in paths]))
    for name, code, err in results:
        print(f"{name}: exit {code}")
        if err:
            sys.stderr.write(err)
    codes = {code for _, code, _ in results}
    if 1 in codes:
        return 1
    if 2 in codes:
        return 2
    return 0


def _cmd_run(args) -> int:
    return _run_path(Path(args.scenario))


def _cmd_expand(args) -> int:
    roots = _parse_rational_list(args.roots)
    mults = _parse_int_list(args.mult)
    print(expand_table(roots, mults, args.numerator))
    return 0


def _cmd_batch(args) -> int:
    return run_batch(Path(args.directory), args.jobs)


def _build_parser() -> _Parser:
    parser = _Parser(prog="staticgeo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute one scenario file")
    runp.add_argument("scenario", help="path to a .scenario file")
    runp.set_defaults(func=_cmd_run)

    expandp = sub.add_parser("expand", help="exact partial-fraction table")
    expandp.add_argument("--roots", required=True, help="comma-separated shifts, e.g. 1,2")
    expandp.add_argument("--mult", required=True, help="comma-separated multiplicities")
    expandp.add_argument("--numerator", choices=("one", "Q"), default="one")
    expandp.set_defaults(func=_cmd_expand)

    batchp = sub.add_parser("batch", help="run every *.scenario file in a directory")
    batchp.add_argument("directory")
    batchp.add_argument("--jobs", type=int, default=1)
    batchp.set_defaults(func=_cmd_batch)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (StaticGeoError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
