"""Figure rendering for the report path; every figure is written to a file."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def figsize(width=5.0, height=None):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    return (width, height or width * golden)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_g2_map(gmap, path, title=None):
    """log10 g2(0) over (E_p, Omega_c) with the minimum line on top."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(5.2, 4.2))
        X, Y = np.meshgrid(gmap.Ep_grid, gmap.Omega_c_grid, indexing="ij")
        mesh = ax.pcolormesh(X, Y, gmap.log10_g2, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=r"$\log_{10} g^{(2)}(0)$")
        locus = gmap.minimum_locus()
        if locus:
            ax.plot([p[0] for p in locus], [p[1] for p in locus], "k-", lw=1.5, label="minimum")
            ax.legend(loc="upper right")
        bad = ~gmap.converged
        if bad.any():
            ax.plot(X[bad], Y[bad], "rx", ms=4)
        if gmap.Ep_grid.size > 1 and gmap.Ep_grid[0] > 0:
            ax.set_xscale("log")
        if gmap.Omega_c_grid.size > 1 and gmap.Omega_c_grid[0] > 0:
            ax.set_yscale("log")
        ax.set_xlabel(r"$E_p/\kappa$")
        ax.set_ylabel(r"$\Omega_c/\kappa$")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_squeeze(spectra, path, labels=None):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for k, s in enumerate(spectra):
            label = labels[k] if labels else None
            ax.plot(s.omega_grid, s.S, lw=1.2, label=label)
        ax.axhline(1.0, color="0.5", lw=0.8, ls="--")
        ax.set_xlabel(r"$\omega/\kappa$")
        ax.set_ylabel(r"$S(\omega)$")
        if labels:
            ax.legend()
        return _save(fig, path)


def plot_g2_tau(series, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        ax.plot(series.grid, np.real(series.values), lw=1.2)
        ax.axhline(1.0, color="0.5", lw=0.8, ls="--")
        ax.set_xlabel(r"$\kappa\tau$")
        ax.set_ylabel(r"$g^{(2)}(\tau)$")
        return _save(fig, path)


def plot_eta(Ep, eta, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(4.5))
        ax.loglog(Ep, eta, "o-", ms=4)
        ax.set_xlabel(r"$E_p/\kappa$")
        ax.set_ylabel(r"$\eta/\kappa$")
        return _save(fig, path)
