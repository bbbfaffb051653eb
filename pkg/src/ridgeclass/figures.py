"""Figure rendering for classification reports.

Renders the per-finger male/female accuracy pattern of a report as a
grouped bar chart saved to disk, so an evaluation run leaves a visual
result next to its delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import FINGERS, ClassificationReport

MALE_COLOR = "#39608c"
FEMALE_COLOR = "#b5533c"


def save_report_figure(report: ClassificationReport, path) -> Path:
    """Write the per-finger accuracy bar chart for one report as a PNG."""
    fingers = np.array(list(FINGERS))
    male = np.array(
        [report.per_finger[f].male_acc or np.nan for f in fingers], dtype=float
    )
    female = np.array(
        [report.per_finger[f].female_acc or np.nan for f in fingers], dtype=float
    )

    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    width = 0.38
    ax.bar(fingers - width / 2, male, width, label="male", color=MALE_COLOR)
    ax.bar(fingers + width / 2, female, width, label="female", color=FEMALE_COLOR)
    if report.male_avg is not None:
        ax.axhline(report.male_avg, color=MALE_COLOR, linestyle="--", linewidth=1,
                   label=f"male avg {report.male_avg:.2f}")
    if report.female_avg is not None:
        ax.axhline(report.female_avg, color=FEMALE_COLOR, linestyle="--", linewidth=1,
                   label=f"female avg {report.female_avg:.2f}")
    ax.set_xticks(fingers)
    ax.set_xlabel("finger number")
    ax.set_ylabel("classification rate (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"per-finger gender classification ({report.config.tag()})")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(axis="y", alpha=0.3)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
