"""Figure rendering for run and sweep reports.

Figures are written next to the CSV they illustrate; the time axis is
logarithmic, which is the natural scale for the early sudden-death events
and the late asymptotics in the same frame.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_CURVES = (
    ("zeta_ku_sq", r"$\zeta_{\mathrm{KU}}^2$", "tab:blue"),
    ("zeta_t_sq", r"$\zeta_{\mathrm{T}}^2$", "tab:orange"),
    ("c_r", r"$C_r$", "tab:green"),
)


def trajectory_figure(data, path: str | Path, title: str = "") -> Path:
    """One panel with the two squeezing measures and the rescaled
    concurrence; ``data`` is a record array with the CSV columns."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for column, label, color in _CURVES:
        ax.plot(data["t"], data[column], label=label, color=color, lw=1.4)
    ax.set_xscale("log")
    ax.set_xlim(left=max(data["t"][1] if len(data["t"]) > 1 else 1e-2, 1e-2))
    ax.set_xlabel(r"$t\,\omega_0$")
    ax.set_ylabel("squeezing / rescaled concurrence")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def sweep_figure(curves, path: str | Path) -> Path:
    """Stacked overlay of all sweep members, one panel per observable.

    ``curves`` is a list of (label, record-array) pairs.
    """
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 8.4), sharex=True)
    for ax, (column, label, _) in zip(axes, _CURVES):
        for name, data in curves:
            ax.plot(data["t"], data[column], lw=1.2, label=name)
        ax.set_xscale("log")
        ax.set_ylabel(label)
    axes[0].legend(frameon=False, fontsize=8)
    axes[-1].set_xlabel(r"$t\,\omega_0$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
