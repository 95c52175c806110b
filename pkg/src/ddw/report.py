"""Write verification results as a CSV table plus rendered figures.

The report directory receives ``residuals.csv`` with one row per family,
sample point, and step, a log-scale chart of per-family maxima against the
tolerance, and, when an order check ran, a log-log step-size plot with a
slope-two reference.
"""

import csv
import os
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .verify import ConvergenceRow, ResidualReport

_FLOOR = 1e-18


def _clamped(value: float) -> float:
    return max(value, _FLOOR)


def write_csv(report: ResidualReport, path: str):
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(
            handle, fieldnames=["family", "mode", "point", "step", "residual"])
        writer.writeheader()
        for record in report.records:
            writer.writerow(record)


def _residual_figure(report: ResidualReport, path: str):
    names = [f.name for f in report.families]
    values = [_clamped(f.max_residual) for f in report.families]
    fig, axis = plt.subplots(figsize=(max(6.0, 0.6 * len(names) + 2.0), 4.0))
    axis.bar(range(len(names)), values, color="#4878a8")
    axis.axhline(report.tolerance, color="#a84848", linestyle="--",
                 label="tolerance %g" % report.tolerance)
    axis.set_yscale("log")
    axis.set_xticks(range(len(names)))
    axis.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    axis.set_ylabel("max |residual|")
    axis.set_title("residuals at step %g" % report.step)
    axis.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _convergence_figure(rows: List[ConvergenceRow], step: float, path: str):
    fig, axis = plt.subplots(figsize=(6.0, 4.0))
    steps = [step, step / 2.0]
    for row in rows:
        axis.loglog(steps, [_clamped(row.coarse), _clamped(row.fine)],
                    marker="o", label=row.name)
    anchor = _clamped(max(row.coarse for row in rows))
    axis.loglog(steps, [anchor, anchor / 4.0], linestyle="--", color="gray",
                label="slope 2")
    axis.set_xlabel("step")
    axis.set_ylabel("max |residual|")
    axis.set_title("step-halving check")
    axis.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(report: ResidualReport, rows: List[ConvergenceRow],
                 directory: str, order_step: float) -> List[str]:
    """Write CSV and figures into the directory; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    paths = [os.path.join(directory, "residuals.csv")]
    write_csv(report, paths[0])
    figure = os.path.join(directory, "residuals.png")
    _residual_figure(report, figure)
    paths.append(figure)
    if rows:
        convergence = os.path.join(directory, "convergence.png")
        _convergence_figure(rows, order_step, convergence)
        paths.append(convergence)
    return paths
