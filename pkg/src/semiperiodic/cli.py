"""Command-line front end: run experiments, print threshold tables, run
config suites, and plot reports.

Exit codes: 0 all pass, 1 any experiment failed its acceptance comparison,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .scaling import load_config, run_experiment, threshold_table, write_report


def _parse_exponent(text: str) -> float:
    if text in ("inf", "infinity", "oo"):
        return math.inf
    return float(text)


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    label = cfg.label or Path(args.config).stem
    out_dir = cfg.output_dir or args.output or "reports"
    path = write_report(report, out_dir, label)
    for s in report.series:
        verdict = "pass" if s.passed else "FAIL"
        pred = "-" if s.predicted_slope is None else f"{s.predicted_slope:+.4f}"
        print(
            f"[{verdict}] {report.kind} / {s.name}: fitted {s.fitted_slope:+.4f} "
            f"(predicted {pred}, tol {s.tolerance:g}, r2 {s.r_squared:.4f})"
        )
    print(f"report: {path}")
    return 0 if report.passed else 1


def _cmd_table(args) -> int:
    try:
        table = threshold_table(args.m, args.n, args.p, args.q, args.r)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name, value in sorted(table.items()):
        print(f"{name}: {value} = {float(value):.6f}")
    return 0


def _cmd_suite(args) -> int:
    directory = Path(args.directory)
    configs = sorted(directory.glob("*.yaml")) + sorted(directory.glob("*.yml"))
    if not configs:
        print(f"no configs found in {directory}", file=sys.stderr)
        return 2
    worst = 0
    for cfg_path in configs:
        ns = argparse.Namespace(config=str(cfg_path), output=args.output)
        rc = _cmd_run(ns)
        worst = max(worst, rc)
        if rc == 2:
            return 2
    return worst


def _cmd_plot(args) -> int:
    try:
        payload = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error reading report: {exc}", file=sys.stderr)
        return 2
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt
    import numpy as np

    series = payload.get("series", [])
    if not series:
        print("report contains no series", file=sys.stderr)
        return 2
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for s in series:
        x = np.array(s["scales"], dtype=float)
        y = np.array(s["values"], dtype=float)
        ax.loglog(x, y, "o", label=f"{s['name']} (fit {s['fitted_slope']:+.3f})")
        lx = np.log(x)
        if x.size >= 2:
            # fitted line through the data in log-log coordinates
            c = np.polyfit(lx, np.log(y), 1)
            ax.loglog(x, np.exp(np.polyval(c, lx)), "-", alpha=0.6)
        if s.get("predicted_slope") is not None:
            anchor = np.exp(np.mean(np.log(y)))
            mid = np.exp(np.mean(lx))
            ax.loglog(
                x, anchor * (x / mid) ** s["predicted_slope"], "--", alpha=0.6,
                label=f"{s['name']} predicted {s['predicted_slope']:+.3f}",
            )
    ax.set_xlabel("scale")
    ax.set_ylabel("norm")
    ax.set_title(f"{payload.get('kind', 'experiment')}")
    ax.legend(fontsize=7)
    out = args.output or str(Path(args.report).with_suffix(".svg"))
    fig.savefig(out, format="svg", bbox_inches="tight")
    print(f"plot: {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="semiperiodic",
        description="Spectral scaling experiments for the free Schrodinger "
        "flow on T^m x R^n",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--output", default=None, help="report directory")
    p_run.set_defaults(func=_cmd_run)

    p_table = sub.add_parser("table", help="print threshold values")
    p_table.add_argument("--m", type=int, required=True)
    p_table.add_argument("--n", type=int, required=True)
    p_table.add_argument("--p", type=_parse_exponent, required=True)
    p_table.add_argument("--q", type=_parse_exponent, required=True)
    p_table.add_argument("--r", type=_parse_exponent, default=None)
    p_table.set_defaults(func=_cmd_table)

    p_suite = sub.add_parser("suite", help="run every config in a directory")
    p_suite.add_argument("directory")
    p_suite.add_argument("--output", default=None)
    p_suite.set_defaults(func=_cmd_suite)

    p_plot = sub.add_parser("plot", help="render a report as an SVG")
    p_plot.add_argument("report")
    p_plot.add_argument("--output", default=None)
    p_plot.set_defaults(func=_cmd_plot)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
