"""Report emission: CSV (long form), JSON (lossless round-trip), and a
markdown table mirroring the benchmark layout (clean column, per-method
severity averages, overall average, MMI), with the row maximum bolded and the
row minimum underlined exactly once each.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from ..errors import DataError
from .evaluate import BenchmarkReport

__all__ = ["emit_report", "report_csv", "report_markdown", "report_plot_csv"]


def report_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "severity", "metric", "value"])
    for metric in report.metric_names:
        writer.writerow(["clean", "", metric, f"{report.clean[metric]:.4f}"])
    for method, severities in sorted(report.per_method_severity.items()):
        for severity, values in sorted(severities.items(), key=lambda kv: int(kv[0])):
            for metric in report.metric_names:
                writer.writerow([method, severity, metric, f"{values[metric]:.4f}"])
    for method, values in sorted(report.per_method_avg.items()):
        for metric in report.metric_names:
            writer.writerow([method, "avg", metric, f"{values[metric]:.4f}"])
    for metric, value in sorted(report.mmi_scores.items()):
        writer.writerow(["mmi", "", metric, f"{100.0 * value:.1f}"])
    return buf.getvalue()


def report_plot_csv(report: BenchmarkReport) -> str:
    """Bar-chart-ready: one row per (method, metric) severity average."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "metric", "avg_value"])
    for method, values in sorted(report.per_method_avg.items()):
        for metric in report.metric_names:
            writer.writerow([method, metric, f"{values[metric]:.4f}"])
    return buf.getvalue()


def _annotate(values: list) -> list:
    """Bold the row max and underline the row min, first occurrence each."""
    cells = [f"{v:.1f}" for v in values]
    if len(values) >= 2:
        hi = values.index(max(values))
        lo = values.index(min(values))
        if hi == lo:
            return cells
        cells[hi] = f"**{cells[hi]}**"
        cells[lo] = f"<u>{cells[lo]}</u>"
    return cells


def report_markdown(report: BenchmarkReport) -> str:
    methods = sorted(report.per_method_avg)
    lines = [
        f"# Benchmark report: {report.dataset_id or 'unnamed dataset'}",
        "",
        f"Capability: {report.capability}. Values are severity averages per method.",
        "",
        "| metric | clean | " + " | ".join(methods) + " | ave | MMI |",
        "|" + "---|" * (len(methods) + 4),
    ]
    for metric in report.metric_names:
        values = [report.per_method_avg[m][metric] for m in methods]
        ave = sum(values) / len(values)
        cells = _annotate(values)
        lines.append(
            f"| {metric} | {report.clean[metric]:.1f} | "
            + " | ".join(cells)
            + f" | {ave:.1f} | {100.0 * report.mmi_scores[metric]:.1f}% |"
        )
    if report.metadata:
        lines.append("")
        lines.append("Run metadata: "
                     + ", ".join(f"{k}={v}" for k, v in sorted(report.metadata.items())))
    return "\n".join(lines) + "\n"


def emit_report(report: BenchmarkReport, out_dir, formats=("csv", "json", "markdown")) -> list:
    """Write the requested formats under ``out_dir``; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        if fmt == "csv":
            path = out_dir / "report.csv"
            path.write_text(report_csv(report), encoding="utf-8")
            plot_path = out_dir / "report_plot.csv"
            plot_path.write_text(report_plot_csv(report), encoding="utf-8")
            written.extend([path, plot_path])
        elif fmt == "json":
            path = out_dir / "report.json"
            path.write_text(report.to_json(), encoding="utf-8")
            written.append(path)
        elif fmt == "markdown":
            path = out_dir / "report.md"
            path.write_text(report_markdown(report), encoding="utf-8")
            written.append(path)
        else:
            raise DataError(f"unknown report format: {fmt!r}")
    return written
