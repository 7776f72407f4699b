"""Delimited output and figure rendering for CLI reports.

CSV cells carry 17 significant digits so doubles round-trip losslessly.
Figures are optional companions to the tables, rendered headless to PNG
next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(format_cell(cell) for cell in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def figure_trace(path: Path, t: Sequence[float], values: Sequence[float], label: str) -> Path:
    """Log-log magnitude of a heat trace over the t grid."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = _new_axes(f"heat trace: {label}")
    mags = [abs(v) if abs(v) > 0 else float("nan") for v in values]
    ax.loglog(t, mags, "o-", ms=3)
    ax.set_xlabel("t")
    ax.set_ylabel("|trace|")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def figure_parameter_scan(path: Path, xs: Sequence[float], values: Sequence[float],
                          xlabel: str, ylabel: str, title: str) -> Path:
    """Computed invariant across a parameter grid, with the spread annotated."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = _new_axes(title)
    ax.plot(xs, values, "o-", ms=4)
    spread = max(values) - min(values) if values else 0.0
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.annotate(f"spread = {spread:.2e}", xy=(0.05, 0.92), xycoords="axes fraction")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def figure_convergence(path: Path, steps: Sequence[float], residuals: Sequence[float],
                       title: str) -> Path:
    """Residual against step size on log-log axes with an order-2 guide."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = _new_axes(title)
    pos = [(s, r) for s, r in zip(steps, residuals) if r > 0]
    if pos:
        xs, ys = zip(*pos)
        ax.loglog(xs, ys, "o-", ms=4, label="residual")
        guide = [ys[0] * (x / xs[0]) ** 2 for x in xs]
        ax.loglog(xs, guide, "--", alpha=0.6, label="order 2")
        ax.legend()
    ax.set_xlabel("step")
    ax.set_ylabel("|residual|")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
