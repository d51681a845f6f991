"""CSV and SVG artifact writers for scenario runs.

All delimited output is written with 17 significant digits and a plain
``\\n`` line terminator so that identical runs produce byte-identical
files; downstream order-of-accuracy checks recompute ratios from these
files.  The SVG plot is rendered with matplotlib's Agg backend and a
pinned hash salt, so its numeric content is deterministic even though the
file as a whole is not contractually byte-stable.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .geometry import MetricModel
from .search import AuditReport
from .verify import ResidualReport

PLOT_FLOOR = 1e-18


def format_number(value: float) -> str:
    return f"{float(value):.17g}"


def profile_table(model: MetricModel) -> tuple[list[str], list[list[str]]]:
    """Header and rows for profile.csv: state columns plus per-block curves."""
    samples = model.profile
    header = ["s", "h", "h1", "h2", "h3", "f", "f1", "f2"]
    columns = [
        samples.s,
        samples.h,
        samples.h1,
        samples.h2,
        samples.h3,
        model.f,
        model.f1,
        model.f2,
    ]
    for block in model.blocks:
        header.append(f"lam_{block.label}")
        columns.append(block.lam)
        if block.zeta is not None:
            header.append(f"zeta_{block.label}")
            columns.append(block.zeta)
    rows = [
        [format_number(col[i]) for col in columns] for i in range(len(samples.s))
    ]
    return header, rows


def write_profile_csv(path: Path, model: MetricModel) -> None:
    header, rows = profile_table(model)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_report_csv(path: Path, report: ResidualReport) -> None:
    meta = [
        report.case,
        str(report.n),
        format_number(report.R),
        format_number(report.step),
        format_number(report.s_range[0]),
        format_number(report.s_range[1]),
        str(report.truncated),
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "case",
                "n",
                "R",
                "step",
                "s_min",
                "s_max",
                "truncated",
                "check",
                "residual",
                "threshold",
                "endpoint",
                "passed",
            ]
        )
        for row in report.to_csv_rows():
            writer.writerow(
                meta
                + [
                    row["check"],
                    format_number(row["residual"]),
                    format_number(row["threshold"]),
                    "" if row["endpoint"] == "" else format_number(row["endpoint"]),
                    str(row["passed"]),
                ]
            )


def write_audit_csv(path: Path, report: AuditReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "shift", "multiplicity", "condition", "value", "violated"])
        for row in report.to_csv_rows():
            writer.writerow(
                [
                    row["class"],
                    row["shift"],
                    row["multiplicity"],
                    row["condition"],
                    row["value"],
                    str(row["violated"]),
                ]
            )


def render_plot(
    path: Path, model: MetricModel, report: ResidualReport | None = None, title: str = ""
) -> None:
    """Profile curves on top; residual curves on a log axis below."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = title or "staticgeo"
    import matplotlib.pyplot as plt

    panels = 2 if report is not None and report.curves else 1
    fig, axes = plt.subplots(panels, 1, figsize=(7.0, 3.2 * panels), sharex=True)
    axes = np.atleast_1d(axes)

    s = model.profile.s
    top = axes[0]
    top.plot(s, model.profile.h, label="h")
    top.plot(s, model.profile.h1, label="h'")
    top.plot(s, model.f, label="f", linestyle="--")
    top.set_ylabel("profile")
    top.legend(loc="best", fontsize=8)
    if title:
        top.set_title(title)

    if panels == 2:
        bottom = axes[1]
        for name, curve in report.curves.items():
            bottom.semilogy(s, np.maximum(np.abs(curve), PLOT_FLOOR), label=name, linewidth=0.9)
        bottom.set_ylabel("residual")
        bottom.set_xlabel("s")
        bottom.legend(loc="best", fontsize=6, ncol=2)
    else:
        top.set_xlabel("s")

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
