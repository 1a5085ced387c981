"""Figure rendering for the batch report paths.

Every function draws to a file through the Agg backend; nothing opens a
display.  Figures sit alongside the CSVs they visualize and carry no data
that is not already in the tables.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be fixed first)
import numpy as np  # noqa: E402

_DPI = 150


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def resonance_figure(rs, path: str) -> None:
    """Resonances in the lower half-plane, colored by angular momentum."""
    fig, ax = plt.subplots(figsize=(8, 5))
    lam = np.array([e.lam for e in rs.entries])
    ls = np.array([e.l for e in rs.entries])
    if len(lam):
        sc = ax.scatter(lam.real, lam.imag, c=ls, s=4, cmap="viridis", lw=0)
        fig.colorbar(sc, ax=ax, label="channel l")
    up = np.array([e.lam for e in rs.upper_entries])
    if len(up):
        ax.scatter(up.real, up.imag, marker="x", color="red", s=40,
                   label="upper half-plane points")
        ax.legend(loc="upper right")
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_title(f"resonances of {rs.potential.label}, R = {rs.radius:g}")
    _save(fig, path)


def profile_figure(dist, path: str) -> None:
    """Angular profile h, its derivative, and the polar density factor."""
    theta = np.linspace(1e-4, np.pi - 1e-4, 600)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    p = dist.profile
    axes[0].plot(theta, p.h(theta), label=r"$h$")
    axes[0].plot(theta, p.h1(theta), label=r"$h'$")
    axes[0].legend()
    axes[0].set_xlabel(r"$\theta$")
    axes[1].plot(theta, p.density(theta), color="tab:red")
    axes[1].set_xlabel(r"$\theta$")
    axes[1].set_ylabel(r"$d^2 h + h''$")
    fig.suptitle(f"angular profile, d = {dist.d}")
    _save(fig, path)


def convergence_figure(rows, path: str) -> None:
    """Empirical-vs-limit mass gap per window over the radius grid."""
    fig, ax = plt.subplots(figsize=(7, 5))
    series: dict[str, list[tuple[float, float]]] = {}
    for r, wid, variant, _, _, gap in rows:
        if variant in ("all", "lower-closed"):
            series.setdefault(wid, []).append((r, gap))
    for wid, pts in sorted(series.items()):
        pts.sort()
        ax.loglog([a for a, _ in pts], [b for _, b in pts], "o-", label=wid)
    ax.set_xlabel("r")
    ax.set_ylabel("|empirical mass - limit mass|")
    ax.legend(fontsize=7)
    _save(fig, path)


def distance_figure(values_by_window, rates, path: str) -> None:
    """Distance to the limit measure over r, with the fitted power law."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for wid, pts in sorted(values_by_window.items()):
        pts = sorted(pts)
        rr = np.array([a for a, _ in pts])
        ax.loglog(rr, [b for _, b in pts], "o-", label=wid)
        if wid in rates:
            slope, icpt, _ = rates[wid]
            ax.loglog(rr, np.exp(icpt) * rr ** slope, "--", lw=1,
                      label=f"{wid}: slope {slope:.2f}")
    ax.set_xlabel("r")
    ax.set_ylabel("distance to limit measure")
    ax.legend(fontsize=7)
    _save(fig, path)


def sample_figure(samples, path: str) -> None:
    """Scatter of draws from the limit distribution on the half-disc."""
    fig, ax = plt.subplots(figsize=(6, 4))
    z = np.asarray(samples)
    ax.scatter(z.real, z.imag, s=2, alpha=0.4, lw=0)
    t = np.linspace(0, np.pi, 200)
    ax.plot(np.cos(t), -np.sin(t), color="gray", lw=0.8)
    ax.plot([-1, 1], [0, 0], color="gray", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    _save(fig, path)
