"""SVG figures rebuilt from the emitted CSV files (signal above input-space scatter)."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "rhcexcite"
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import read_points, read_signal  # noqa: E402


def _draw(ax_sig, ax_pts, run_dir, title=None):
    run_dir = Path(run_dir)
    u = read_signal(run_dir / "signal.csv")
    X, _ = read_points(run_dir / "process_distribution.csv")
    psi, extra = read_points(run_dir / "psi.csv")
    q = extra.get("q", np.ones(len(psi)))

    ax_sig.step(np.arange(1, len(u) + 1), u, where="post", lw=0.8)
    ax_sig.set_xlabel("k")
    ax_sig.set_ylabel("u(k)")
    if title:
        ax_sig.set_title(title)

    boosted = q > q.min()
    ax_pts.scatter(psi[~boosted, 0], psi[~boosted, 1], s=4, c="0.7", marker=".", label="psi")
    if boosted.any():
        ax_pts.scatter(psi[boosted, 0], psi[boosted, 1], s=6, c="red", marker=".",
                       label="psi (boosted)")
    sur = run_dir / "surrogate_distribution.csv"
    if sur.exists():
        Xs, _ = read_points(sur)
        ax_pts.scatter(Xs[:, 0], Xs[:, 1], s=6, facecolors="none", edgecolors="tab:orange",
                       lw=0.5, label="surrogate")
    ax_pts.scatter(X[:, 0], X[:, 1], s=6, c="tab:blue", label="process")
    ax_pts.set_xlabel("u(k)")
    ax_pts.set_ylabel("y(k)")
    ax_pts.set_aspect("equal", adjustable="datalim")


def plot_run(run_dir, path=None):
    """Two-panel figure for one design or evaluation directory."""
    run_dir = Path(run_dir)
    fig, (a, b) = plt.subplots(2, 1, figsize=(4.5, 7))
    _draw(a, b, run_dir)
    b.legend(fontsize="x-small", loc="upper left")
    fig.tight_layout()
    path = Path(path or run_dir / "design.svg")
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_compare(run_dirs, labels, path):
    """One column per variant: signal on top, input-space scatter below."""
    n = len(run_dirs)
    fig, axes = plt.subplots(2, n, figsize=(3.6 * n, 6.5), squeeze=False)
    for i, (d, lab) in enumerate(zip(run_dirs, labels)):
        _draw(axes[0, i], axes[1, i], d, lab)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return Path(path)
