"""
Optional figures for the CLI ``--figure`` flag.

matplotlib is imported lazily so the rest of the package never needs it.
"""

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render(path, table, plot):
    """Draw the figure matching a subcommand's table and save it to ``path``."""
    plt = _pyplot()
    kind = plot[0]
    rows = np.array([r for r in table.rows if not isinstance(r[0], str)], dtype=float) \
        if kind != "poisson" else None
    if kind == "waveguide" and plot[1].modes is not None and plot[1].errors is None:
        fig = _mode_panel(plt, plot[1])
    elif kind == "poisson":
        fig = _potential(plt, plot[1])
    else:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        if kind == "kernel":
            ax.stem(rows[:, 0], rows[:, 2])
            ax.set_xlabel("offset / delta")
            ax.set_ylabel(table.columns[2])
        elif kind == "curve":
            ax.plot(rows[:, 0], rows[:, 1])
            ax.set_xlabel(table.columns[0])
            ax.set_ylabel(table.columns[1])
        elif kind == "zoo":
            ax.loglog(rows[:, 0], np.maximum(rows[:, 2], 1e-300), "o-")
            ax.set_xlabel("sequence parameter")
            ax.set_ylabel("|integral - phi(0)|")
        elif kind == "zoo-positivity":
            ax.plot(rows[:, 0], rows[:, 1], "o-", label="min value")
            ax.plot(rows[:, 0], rows[:, 2], "s-", label="mass")
            ax.legend()
            ax.set_xlabel("sequence parameter")
        elif kind == "waveguide":
            ax.semilogy(rows[:, 0], np.maximum(rows[:, 3], 1e-18), "o")
            ax.set_xlabel("mode")
            ax.set_ylabel("absolute error")
        elif kind == "wave":
            ax.semilogy(rows[1:, 0], np.maximum(rows[1:, 1], 1e-18), "o-")
            ax.set_xlabel("t")
            ax.set_ylabel("L-inf error")
        fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _mode_panel(plt, report, count=4):
    count = min(count, report.modes.shape[0])
    fig, axes = plt.subplots(1, count, figsize=(3 * count, 3))
    for i, ax in enumerate(np.atleast_1d(axes)):
        ax.imshow(report.modes[i].T, origin="lower", cmap="RdBu_r", vmin=-1, vmax=1)
        ax.set_title(f"mode {i + 1}: k^2={report.eigenvalues[i]:.4g}")
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    return fig


def _potential(plt, report):
    grid = report.field.grid
    x, y = grid.mesh()
    fig, ax = plt.subplots(figsize=(4.5, 4))
    cs = ax.contourf(x, y, report.field.values, levels=30)
    fig.colorbar(cs, ax=ax, label="V")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    fig.tight_layout()
    return fig
