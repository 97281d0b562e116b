"""Figure rendering for run reports (written next to the delimited output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .trace import Trace


def render_cumulative_mistakes(trace: Trace, path: Path, title: str = "") -> Path:
    """Plot cumulative mistakes against step number and save as PNG."""
    steps, cumulative = [], []
    total = 0
    for rec in trace.records:
        total += 1 if rec.mistake else 0
        steps.append(rec.step)
        cumulative.append(total)
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.step(steps, cumulative, where="post", lw=1.5)
    ax.set_xlabel("step")
    ax.set_ylabel("cumulative mistakes")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_error_per_seed(errors: list[tuple[int, float]], path: Path, title: str = "") -> Path:
    """Scatter of final hypothesis error per seed (floats for display only)."""
    fig, ax = plt.subplots(figsize=(7, 4.2))
    xs = list(range(len(errors)))
    ys = [e for _, e in errors]
    ax.plot(xs, ys, "o", ms=4)
    if ys:
        mean = sum(ys) / len(ys)
        ax.axhline(mean, color="tab:red", lw=1, label=f"mean = {mean:.3f}")
        ax.legend()
    ax.set_xlabel("seed index")
    ax.set_ylabel("exact error (shown as float)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
