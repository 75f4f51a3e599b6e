"""Rendering of evaluation reports: JSON, CSV, a fixed-width table and a bar chart."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

from decompkit.pipeline import EvalReport

LEVELS = ("O0", "O1", "O2", "O3")

# (key, label, scale): rates are shown as percentages, judge ratings raw
ROWS = (
    ("reexec", "Re-executability", 100.0),
    ("r2i", "R2I", 100.0),
    ("judge", "Judge (1-5)", 1.0),
)


def level_columns(report: EvalReport) -> list[str]:
    known = [lvl for lvl in LEVELS if lvl in report.levels]
    extra = sorted(lvl for lvl in report.levels if lvl not in LEVELS)
    return known + extra


def _cell(agg: dict, key: str, scale: float) -> Optional[float]:
    value = agg.get(key)
    return None if value is None else round(value * scale, 2)


def table_rows(report: EvalReport) -> list[tuple[str, list[Optional[float]]]]:
    cols = level_columns(report)
    rows = []
    for key, label, scale in ROWS:
        if key not in report.overall:
            continue
        values = [_cell(report.levels[c], key, scale) for c in cols]
        values.append(_cell(report.overall, key, scale))
        rows.append((label, values))
    return rows


def render_json(report: EvalReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def render_table(report: EvalReport) -> str:
    header = ["Metric"] + level_columns(report) + ["AVG"]
    body = [[label] + ["-" if v is None else f"{v:.2f}" for v in values]
            for label, values in table_rows(report)]
    body.append(["n"] + [str(report.levels[c]["n"]) for c in level_columns(report)]
                + [str(report.overall["n"])])
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest)

    rule = "-" * len(line(header))
    return "\n".join([line(header), rule] + [line(r) for r in body]) + "\n"


def render_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric"] + level_columns(report) + ["AVG"])
    for label, values in table_rows(report):
        writer.writerow([label] + ["" if v is None else f"{v:.2f}" for v in values])
    return buf.getvalue()


def render_figure(report: EvalReport, path: str) -> None:
    """Grouped bars per metric and level. Output bytes are reproducible."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [(label, values) for label, values in table_rows(report) if label != "Judge (1-5)"]
    cols = level_columns(report) + ["AVG"]
    fig, ax = plt.subplots(figsize=(7, 4), dpi=100)
    width = 0.8 / max(1, len(rows))
    for i, (label, values) in enumerate(rows):
        xs = [j + i * width for j in range(len(cols))]
        ax.bar(xs, [0.0 if v is None else v for v in values], width=width, label=label)
    ax.set_xticks([j + width * (len(rows) - 1) / 2 for j in range(len(cols))])
    ax.set_xticklabels(cols)
    ax.set_ylim(0, 100)
    ax.set_ylabel("score (%)")
    ax.set_title(report.metadata.get("preset", "evaluation"))
    if rows:
        ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)


def write_report(report: EvalReport, out_dir: str, figure: bool = True) -> dict:
    """Write report.json, report.csv, report.txt and (optionally) report.png."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / "report.json",
        "csv": out / "report.csv",
        "table": out / "report.txt",
    }
    paths["json"].write_text(render_json(report))
    paths["csv"].write_text(render_csv(report))
    paths["table"].write_text(render_table(report))
    if figure:
        paths["figure"] = out / "report.png"
        render_figure(report, str(paths["figure"]))
    return {k: str(v) for k, v in paths.items()}


def load_report(path: str) -> EvalReport:
    return EvalReport.from_json(json.loads(Path(path).read_text()))
