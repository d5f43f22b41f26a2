"""Matplotlib renderings of profiles, scans, ladders, and reports.

The CLI writes these PNGs next to its delimited output when asked; the
data files stay the source of truth and are byte-deterministic, figures
are a convenience view.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .diagnostics import DiagnosticsReport  # noqa: E402

__all__ = [
    "save_profile_figure",
    "save_curvature_figure",
    "save_gap_figure",
    "save_theta_figure",
    "save_report_figures",
]

_STYLE = {"figure.figsize": (5.0, 3.4), "font.size": 9, "axes.grid": True}


def _decay_plot(pairs, xlabel, ylabel, title, path):
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        positive = all(y > 0 for y in ys)
        if positive:
            ax.loglog(xs, ys, "o-")
        else:
            ax.semilogx(xs, ys, "o-")
        ax.invert_xaxis()  # read coarse -> fine left to right
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def save_profile_figure(profile, path) -> Path:
    path = Path(path)
    _decay_plot(
        profile.entries,
        "cube side",
        f"sup density (n = {profile.exponent})",
        "density profile",
        path,
    )
    return path


def save_curvature_figure(ratios, path) -> Path:
    path = Path(path)
    _decay_plot(ratios, "cube side", "max curvature / mass", "curvature ratio scan", path)
    return path


def save_gap_figure(gaps, path) -> Path:
    path = Path(path)
    pairs = [(e2, g) for _, e2, g in gaps]
    _decay_plot(pairs, "outer truncation radius", "norm gap", "truncation gaps", path)
    return path


def save_theta_figure(series, path) -> Path:
    path = Path(path)
    ks = [k for k, _, _ in series]
    thetas = [t for _, t, _ in series]
    partials = [p for _, _, p in series]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(ks, thetas, "o-", label="theta_k")
        ax.semilogy(ks, partials, "s--", label="partial sum of theta^2")
        ax.set_xlabel("generation k")
        ax.set_ylabel("value")
        ax.set_title("generation density parameters")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path


def save_report_figures(report: DiagnosticsReport, directory) -> list:
    """Render every populated section of a report into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if report.density.entries:
        written.append(save_profile_figure(report.density, directory / "density_profile.png"))
    if report.curvature_ratios:
        written.append(
            save_curvature_figure(report.curvature_ratios, directory / "curvature_ratios.png")
        )
    if report.truncation_gaps:
        written.append(save_gap_figure(report.truncation_gaps, directory / "truncation_gaps.png"))
    if report.theta_series:
        written.append(save_theta_figure(report.theta_series, directory / "theta_series.png"))
    return written
