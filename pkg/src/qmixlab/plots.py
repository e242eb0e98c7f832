"""SVG figures for suite reports.

Figures are built on bare matplotlib Figure objects (no pyplot state) and
written with a fixed hash salt and no date stamp, so identical data give
identical bytes.  The plotted data is embedded as an XML comment."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "qmixlab"
matplotlib.rcParams["svg.fonttype"] = "none"

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402


def _save(fig: Figure, path, data_csv: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    with open(path, encoding="utf-8") as fh:
        svg = fh.read()
    comment = "<!-- data\n" + data_csv.replace("--", "- -") + "-->\n"
    head, sep, rest = svg.partition("?>\n")
    svg = head + sep + comment + rest if sep else comment + svg
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)


def contour_svg(path, a, b, grid, title: str, data_csv: str) -> None:
    fig = Figure(figsize=(5.5, 4.5))
    ax = fig.add_subplot()
    A, B = np.meshgrid(a, b, indexing="ij")
    cs = ax.contourf(A, B, grid, levels=24, cmap="viridis")
    fig.colorbar(cs, ax=ax)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_title(title)
    _save(fig, path, data_csv)


def lines_svg(path, x, series, title: str, xlabel: str, ylabel: str, data_csv: str,
              logy: bool = False) -> None:
    """series: list of (label, y values, optional y errors)."""
    fig = Figure(figsize=(5.5, 4.0))
    ax = fig.add_subplot()
    for label, y, err in series:
        y = np.asarray(y, dtype=float)
        if logy:
            y = np.where(y > 0, y, np.nan)
        if err is None:
            ax.plot(x, y, marker="o", ms=3, label=label)
        else:
            ax.errorbar(x, y, yerr=err, marker="o", ms=3, capsize=2, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    _save(fig, path, data_csv)


def scatter_svg(path, x, y, groups, title: str, xlabel: str, ylabel: str, data_csv: str) -> None:
    fig = Figure(figsize=(5.5, 4.0))
    ax = fig.add_subplot()
    for g in sorted(set(groups)):
        sel = [k for k, v in enumerate(groups) if v == g]
        ax.scatter([x[k] for k in sel], [y[k] for k in sel], s=6, label=g)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize="small")
    _save(fig, path, data_csv)
