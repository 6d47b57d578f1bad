"""Render report figures to image files alongside the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_quality_figure(report, path):
    """Bar chart of the five quality ratios."""
    dims = report.dimensions()
    names = [d.name for d in dims]
    ratios = [d.ratio for d in dims]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(names, ratios, color="#4878a8")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("ratio")
    ax.set_title("data quality dimensions")
    for bar, dim in zip(bars, dims):
        ax.text(
            bar.get_x() + bar.get_width() / 2,
            bar.get_height() + 0.02,
            f"{dim.numerator}/{dim.denominator}",
            ha="center",
            fontsize=8,
        )
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_fair_figure(report, path):
    """Pass/fail chart of the four FAIR dimensions."""
    dims = report.dimensions()
    names = [d.name for d in dims]
    values = [1.0 if d.passed else 0.0 for d in dims]
    colors = ["#3c8c50" if d.passed else "#b04040" for d in dims]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(names, values, color=colors)
    ax.set_ylim(0.0, 1.2)
    ax.set_yticks([0.0, 1.0])
    ax.set_yticklabels(["fail", "pass"])
    ax.set_title("FAIR assessment")
    plt.setp(ax.get_xticklabels(), rotation=15, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
