"""Figure rendering for residual reports.

Renders two kinds of files next to the delimited output: a log-log
convergence chart of every order-checked residual family (with a slope-2
reference), and per-field magnitude maps at the finest grid.  Everything
goes through the Agg backend so runs stay headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .grid import ScalarField  # noqa: E402
from .report import ReportBuilder  # noqa: E402

__all__ = ["save_convergence_figure", "save_field_heatmap", "render_report_figures"]

_FIG_DPI = 130


def save_convergence_figure(builder: ReportBuilder, path: str | Path) -> Path:
    """Normalized interior max norm against grid spacing, one line per family."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    hs_ref = None
    anchor = 0.0
    for name in sorted(builder.series):
        s = builder.series[name]
        sizes = sorted(s.norms)
        if s.check == "none" or len(sizes) < 2:
            continue
        hs = np.array([1.0 / (n - 1) for n in sizes])
        vals = np.array([max(s.normalized_linf(n), 1e-18) for n in sizes])
        ax.loglog(hs, vals, marker="o", label=name)
        anchor = max(anchor, vals[-1])
        hs_ref = hs if hs_ref is None else hs_ref
    if hs_ref is not None:
        ref = max(anchor, 1e-18) * (hs_ref / hs_ref[-1]) ** 2
        ax.loglog(hs_ref, ref, linestyle="--", color="gray", label="h^2 reference")
    ax.set_xlabel("grid spacing h (per unit range)")
    ax.set_ylabel("normalized interior max norm")
    ax.set_title(f"{builder.experiment}: residual convergence")
    ax.grid(True, which="both", alpha=0.3)
    if hs_ref is not None:
        ax.legend(fontsize=8)
    path = Path(path)
    fig.savefig(path, dpi=_FIG_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_field_heatmap(fld: ScalarField, title: str, path: str | Path) -> Path:
    """Magnitude map of one field over the (alpha, beta) rectangle."""
    g = fld.grid
    fig, ax = plt.subplots(figsize=(6.0, 4.8))
    extent = (
        g.beta0,
        g.beta0 + (g.n_beta - 1) * g.h_beta,
        g.alpha0,
        g.alpha0 + (g.n_alpha - 1) * g.h_alpha,
    )
    im = ax.imshow(
        np.abs(fld.values), origin="lower", extent=extent, aspect="auto", cmap="viridis"
    )
    fig.colorbar(im, ax=ax, label="|value|")
    ax.set_xlabel("beta")
    ax.set_ylabel("alpha")
    ax.set_title(title)
    path = Path(path)
    fig.savefig(path, dpi=_FIG_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def render_report_figures(builder: ReportBuilder, out_dir: str | Path) -> list[Path]:
    """Convergence chart plus a heatmap of every family at its finest grid."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [save_convergence_figure(builder, out_dir / "convergence.png")]
    for name in sorted(builder.series):
        s = builder.series[name]
        if not s.fields:
            continue
        n = max(s.fields)
        written.append(
            save_field_heatmap(
                s.fields[n], f"{name} at {n} x {n}", out_dir / f"{name}_{n}.png"
            )
        )
    return written
