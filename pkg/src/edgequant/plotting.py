"""Static SVG rendering of trajectory CSV files."""

from __future__ import annotations

import os

import matplotlib as mpl
from matplotlib.figure import Figure

from .csvio import read_trajectory_csv

__all__ = ["plot_csv"]

NORM_GID = "z_T_norm"
ENVELOPE_GID = "envelope"


def plot_csv(csv_path: str | os.PathLike, out_path: str | os.PathLike) -> None:
    """Position/velocity traces per component plus the tree-state norm.

    The norm axis is logarithmic; the certified envelope is overlaid when the
    CSV carries one.  The norm and envelope lines get the SVG ids
    ``z_T_norm`` and ``envelope``.
    """
    table = read_trajectory_csv(csv_path)
    S, N, n = table.x.shape
    single = S == 1
    style = dict(marker="o", linestyle="none") if single else dict(linewidth=0.8)

    with mpl.rc_context({"svg.hashsalt": "edgequant", "svg.fonttype": "none"}):
        fig = Figure(figsize=(9, 2.2 * (n + 1)))
        grid = fig.add_gridspec(n + 1, 2)
        for k in range(n):
            for col, (name, arr) in enumerate((("x", table.x), ("v", table.v))):
                ax = fig.add_subplot(grid[k, col])
                for i in range(N):
                    ax.plot(table.times, arr[:, i, k], label=f"agent {i + 1}", **style)
                ax.set_ylabel(f"{name}(:, {k + 1})")
                if k == 0 and col == 0:
                    ax.legend(fontsize="x-small", ncol=min(N, 5))
        ax = fig.add_subplot(grid[n, :])
        positive = table.z_T_norm > 0
        if positive.any():
            ax.set_yscale("log", nonpositive="mask")
        (line,) = ax.plot(table.times, table.z_T_norm, color="k", label="|z_T|", **style)
        line.set_gid(NORM_GID)
        if table.envelope is not None:
            (env,) = ax.plot(table.times, table.envelope, color="tab:red", linestyle="--",
                             marker="o" if single else None, label="certified envelope")
            env.set_gid(ENVELOPE_GID)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("|z_T|")
        ax.legend(fontsize="small")
        if single:
            t0 = float(table.times[0])
            ax.set_xlim(t0 - 1.0, t0 + 1.0)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
