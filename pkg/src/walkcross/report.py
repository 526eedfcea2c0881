"""Experiment reports: CSV emission with metadata headers, and figures.

Artifacts are self-describing: every CSV starts with `# key=value` header
lines carrying the full configuration (seeds, tolerances, mesh levels), so
a report can be regenerated from its own header.  Re-running with the same
configuration reproduces the file byte for byte except for the
`generated_at` line.  Figures are rendered next to the delimited output.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field


@dataclass
class ExperimentReport:
    """Tabular result of one experiment run plus its provenance."""

    experiment: str
    columns: tuple[str, ...]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(report: ExperimentReport, path, timestamp: bool = True) -> None:
    """Write the report with its metadata header.

    The `generated_at` line is informational and excluded from byte-level
    determinism comparisons.
    """
    lines = [f"# experiment={report.experiment}"]
    for key in sorted(report.metadata):
        lines.append(f"# {key}={_fmt(report.metadata[key])}")
    if timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        lines.append(f"# generated_at={stamp}")
    lines.append(",".join(report.columns))
    for row in report.rows:
        lines.append(",".join(_fmt(row[c]) for c in report.columns))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Inverse of :func:`write_csv`: (metadata dict, column names, rows)."""
    meta = {}
    columns = None
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                meta[key] = value
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append(dict(zip(columns, line.split(","))))
    return meta, columns, rows


_Y_COLUMN = {
    "thm11": ("n", ["ratio_error"], "|ratio - 1|", True),
    "thm12": ("n", ["abs_error"], "absolute error", True),
    "cor14": ("n", ["abs_difference"], "determinant difference", True),
    "prop316": ("n", ["ratio_error"], "|ratio - 1|", True),
    "prop15": ("L", ["log_lambda_exact", "log_lambda_leading"],
               "log Lambda", False),
}


def render_figure(report: ExperimentReport, path) -> None:
    """Render the report's headline quantity to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xcol, ycols, ylabel, logy = _Y_COLUMN.get(
        report.experiment,
        (report.columns[0], [report.columns[-1]], report.columns[-1], False))

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    labels = sorted({row.get("point", "") for row in report.rows})
    for ycol in ycols:
        for label in labels:
            rows = [r for r in report.rows if r.get("point", "") == label]
            xs = [r[xcol] for r in rows]
            ys = [r[ycol] for r in rows]
            name = ycol if label == "" else f"{ycol} {label}"
            ax.plot(xs, ys, marker="o", label=name)
    if logy:
        ax.set_yscale("log")
        ax.set_xscale("log", base=2)
    ax.set_xlabel(xcol)
    ax.set_ylabel(ylabel)
    ax.set_title(report.experiment)
    if len(ycols) > 1 or len(labels) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
