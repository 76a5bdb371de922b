"""Figure rendering for sweep output, written next to the delimited data.

Uses the Agg backend so the CLI can render headless.  Two views of a scan:
the settled-iterate scatter (the classic bifurcation diagram) and a four-
panel summary of the per-(mu, x0) cycle structure.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .applications import ScanResult

_FIG_DPI = 150


def bifurcation_figure(result: ScanResult, path: str) -> None:
    """Scatter of settled iterates f^k(x0)/2^n against the control parameter."""
    mus = np.array([float(s.mu) for s in result.iterates])
    values = np.array([float(s.value) for s in result.iterates])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(mus, values, ",k", alpha=0.5)
    ax.set_xlabel(r"$\mu$")
    ax.set_ylabel(r"$f^k(x_0)/2^n$")
    ax.set_ylim(0, 1)
    ax.set_title(f"Truncated logistic iterates, n={result.n_qubits} qubits")
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)


def orbit_structure_figure(result: ScanResult, path: str) -> None:
    """Four panels: median period, period image, settled iterates, link image.

    The two images need a full (mu, x0) grid; missing combinations render
    as blanks.
    """
    records = result.records
    mus = sorted({rec.mu for rec in records})
    starts = sorted({rec.x0 for rec in records})
    mu_index = {mu: i for i, mu in enumerate(mus)}
    x0_index = {x0: i for i, x0 in enumerate(starts)}
    period_img = np.full((len(starts), len(mus)), np.nan)
    link_img = np.full((len(starts), len(mus)), np.nan)
    for rec in records:
        period_img[x0_index[rec.x0], mu_index[rec.mu]] = rec.period
        link_img[x0_index[rec.x0], mu_index[rec.mu]] = rec.link_length

    medians: dict = {}
    for rec in records:
        medians.setdefault(rec.mu, []).append(rec.period)
    mu_f = [float(mu) for mu in mus]
    median_vals = [
        sorted(medians[mu])[(len(medians[mu]) - 1) // 2] for mu in mus
    ]

    extent = (min(mu_f), max(mu_f), min(starts), max(starts))
    fig, axes = plt.subplots(4, 1, figsize=(7, 11), sharex=True)

    axes[0].step(mu_f, median_vals, where="mid", color="tab:blue")
    axes[0].set_ylabel("median period")

    im1 = axes[1].imshow(
        period_img, aspect="auto", origin="lower", extent=extent, cmap="viridis"
    )
    axes[1].set_ylabel(r"$x_0$")
    fig.colorbar(im1, ax=axes[1], label="period")

    cmap = plt.get_cmap("turbo")
    max_period = max((rec.period for rec in records), default=1)
    by_mu: dict = {}
    for s in result.iterates:
        by_mu.setdefault(s.mu, []).append(float(s.value))
    for mu in mus:
        periods = medians[mu]
        color = cmap((sorted(periods)[(len(periods) - 1) // 2] - 1) / max(max_period - 1, 1))
        vals = by_mu.get(mu, [])
        axes[2].plot([float(mu)] * len(vals), vals, ",", color=color)
    axes[2].set_ylabel(r"$f^k(x_0)/2^n$")
    axes[2].set_ylim(0, 1)

    im3 = axes[3].imshow(
        link_img, aspect="auto", origin="lower", extent=extent, cmap="magma"
    )
    axes[3].set_ylabel(r"$x_0$")
    axes[3].set_xlabel(r"$\mu$")
    fig.colorbar(im3, ax=axes[3], label="link length")

    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)
