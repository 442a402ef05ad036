"""Run records, stable CSV emission, and optional figure rendering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "RunReport",
    "CSV_HEADER",
    "format_float",
    "reports_to_csv",
    "write_reports",
    "merge_trace_csv",
    "plot_ratio_curve",
    "plot_value_bars",
]

CSV_HEADER = [
    "instance",
    "algorithm",
    "objective",
    "seed",
    "trial",
    "value",
    "reference",
    "ratio",
    "wall_time_s",
]


@dataclass(frozen=True)
class RunReport:
    """One (algorithm, trial) outcome against a reference value.

    ratio is value/reference when the reference is positive, else NaN.
    """

    instance: str
    algorithm: str
    objective: str
    seed: int
    trial: int
    value: float
    reference: float
    wall_time_s: float

    @property
    def ratio(self) -> float:
        if self.reference > 0:
            return self.value / self.reference
        return float("nan")


def format_float(x: float) -> str:
    """12 significant digits; integers still get a stable rendering."""
    return f"{x:.12g}"


def reports_to_csv(reports: list[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(
            [
                r.instance,
                r.algorithm,
                r.objective,
                r.seed,
                r.trial,
                format_float(r.value),
                format_float(r.reference),
                format_float(r.ratio),
                format_float(r.wall_time_s),
            ]
        )
    return buf.getvalue()


def write_reports(reports: list[RunReport], path: str) -> None:
    with open(path, "w") as f:
        f.write(reports_to_csv(reports))


def merge_trace_csv(trace) -> str:
    """Merge steps as CSV rows (step, size_a, size_b, average)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "size_a", "size_b", "average"])
    for s in trace:
        w.writerow([s.step, s.size_a, s.size_b, format_float(s.average)])
    return buf.getvalue()


def plot_ratio_curve(xs, ratios, asymptote: float, title: str, path: str) -> None:
    """Ratio-vs-size curve with its asymptote, written to `path`."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ratios, marker="o", label="ratio")
    ax.axhline(asymptote, color="tab:red", linestyle="--", label=f"asymptote {asymptote:.4g}")
    ax.set_xlabel("instance size parameter")
    ax.set_ylabel("value / reference")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_value_bars(labels, values, title: str, path: str) -> None:
    """Per-algorithm objective values as a bar chart, written to `path`."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(values)), values)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("objective value")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
