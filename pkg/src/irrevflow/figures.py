"""Matplotlib figure rendering for the report path.

Figures are written next to the delimited output of each run. The Agg
backend is forced so rendering works in headless environments.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render_trajectory(path, times, values, label="(psi_t, M_F psi_t)"):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(times, values, marker=".", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel(label)
    ax.set_title("Lyapounov trajectory")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def render_residuals(path, names, values, title="Residuals"):
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    pos = np.arange(len(names))
    vals = np.maximum(np.asarray(values, dtype=float), 1e-20)
    ax.bar(pos, vals, width=0.6)
    ax.set_yscale("log")
    ax.set_xticks(pos)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def render_exhaustion(path, times, fractions):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(np.maximum(times, times[times > 0].min() / 2 if np.any(times > 0) else 1e-3),
                fractions, marker="o", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("trace fraction of the past")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Past subspace exhaustion")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def render_convergence(path, sizes, values, label="residual"):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(sizes, np.maximum(np.asarray(values, dtype=float), 1e-20),
              marker="s", lw=1.2)
    ax.set_xlabel("grid size n")
    ax.set_ylabel(label)
    ax.set_title("Convergence sweep")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path
