"""Command-line interface.

Subcommands:

* ``check``  -- run the hypothesis stages only and write the report,
* ``solve``  -- run the full pipeline and write report + solution fields,
* ``verify`` -- re-verify an exported solution CSV against its config,
* ``report`` -- re-render a stored report.json as text.

Exit status is 0 only when every verdict of the run is true.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time

from .errors import SolverError
from .pipeline import (RunConfig, check_hypotheses, load_config,
                       render_report, run_pipeline, verify_solution_file,
                       write_outputs)


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    changes = {}
    if getattr(args, "resolution", None) is not None:
        changes["resolution"] = args.resolution
    if getattr(args, "out", None) is not None:
        changes["output_dir"] = args.out
    if getattr(args, "max_chi", None) is not None:
        changes["enumeration"] = dataclasses.replace(config.enumeration,
                                                     max_chi=args.max_chi)
    if getattr(args, "vtk", False):
        changes["export_vtk"] = True
    return dataclasses.replace(config, **changes) if changes else config


def _cmd_check(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    start = time.perf_counter()
    report, context = check_hypotheses(config)
    if context is not None:
        report.status = "ok"
    report.timings["total"] = time.perf_counter() - start
    write_outputs(report, config.output_dir)
    sys.stdout.write(render_report(report))
    return 0 if report.status == "ok" else 2


def _cmd_solve(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    report = run_pipeline(config)
    sys.stdout.write(render_report(report))
    if report.passed:
        return 0
    return 2 if report.violated_hypothesis else 1


def _cmd_verify(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    verification = verify_solution_file(config, args.field_file)
    for name, verdict in verification.verdicts.items():
        sys.stdout.write(f"{name}: {'pass' if verdict else 'fail'}\n")
    sys.stdout.write(f"residual-norm: {verification.residual_norm!r}\n")
    sys.stdout.write(f"bounds: [{verification.min_value!r}, {verification.max_value!r}]\n")
    sys.stdout.write(f"zero-trace-max: {verification.zero_trace_max!r}\n")
    sys.stdout.write(f"w11-seminorm: {verification.w11_seminorm!r}\n")
    sys.stdout.write(f"overall: {'pass' if verification.passed else 'fail'}\n")
    return 0 if verification.passed else 2


def _cmd_report(args) -> int:
    with open(args.report_json) as handle:
        data = json.load(handle)
    sys.stdout.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="multibump",
        description="Multi-bump solutions of degenerate semilinear elliptic problems")
    parser.add_argument("--verbose", action="store_true", help="log stage timings")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the JSON run configuration")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--resolution", type=int, help="override nodes per axis")
    common.add_argument("--max-chi", type=int, dest="max_chi",
                        help="override the enumeration guard threshold")

    p_check = sub.add_parser("check", parents=[common],
                             help="run hypothesis checks only")
    p_check.set_defaults(func=_cmd_check)

    p_solve = sub.add_parser("solve", parents=[common], help="run the full pipeline")
    p_solve.add_argument("--vtk", action="store_true",
                         help="also export solutions as legacy VTK files")
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", parents=[common],
                              help="re-verify an exported solution field")
    p_verify.add_argument("field_file", help="solution CSV produced by solve")
    p_verify.set_defaults(func=_cmd_verify)

    p_report = sub.add_parser("report", help="re-render a stored report")
    p_report.add_argument("report_json", help="path to report.json")
    p_report.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        return args.func(args)
    except SolverError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
