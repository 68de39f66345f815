"""CSV and SVG renderings of tau-plane maps and metric densities.

Figures are drawn with the Agg backend and written with a fixed hash salt
and no date stamp, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .region import TauRegionMap

# (label, tau, svg group id)
MARKERS = (
    ("i", 1j, "marker-i"),
    (r"$e^{i\pi/3}$", complex(0.5, math.sqrt(3) / 2), "marker-eipi3"),
)

REGION_CSV_HEADER = ("tau_re", "tau_im", "f1", "f2", "f3", "in_region", "count")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def region_csv(m: TauRegionMap) -> str:
    """One row per grid node, ``Im`` outer and ``Re`` inner; blanks where unevaluated."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGION_CSV_HEADER)
    ny, nx = m.shape
    for j in range(ny):
        for i in range(nx):
            row = [fmt_float(m.re[i]), fmt_float(m.im[j])]
            if m.evaluated[j, i]:
                row += [int(b) for b in m.flags[j, i]] + [int(m.in_region[j, i])]
            else:
                row += ["", "", "", ""]
            if m.solver_count is not None and m.solver_count[j, i] >= 0:
                row.append(int(m.solver_count[j, i]))
            else:
                row.append("")
            w.writerow(row)
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "torusgreen"
    plt.rcParams["svg.fonttype"] = "none"
    plt.rcParams["font.size"] = 9
    return plt


def _save_svg(fig, path) -> None:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    Path(path).write_text(buf.getvalue())


def region_svg(m: TauRegionMap, path) -> None:
    """Region filled in grey on the scan window, with the two reference points marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.0, 5.0))
    dx = (m.re[-1] - m.re[0]) / max(len(m.re) - 1, 1) / 2
    dy = (m.im[-1] - m.im[0]) / max(len(m.im) - 1, 1) / 2
    extent = (m.re[0] - dx, m.re[-1] + dx, m.im[0] - dy, m.im[-1] + dy)
    ax.imshow(
        m.in_region.astype(float),
        origin="lower",
        extent=extent,
        cmap="Greys",
        vmin=0.0,
        vmax=1.6,
        interpolation="nearest",
        aspect="auto",
    )
    for label, tau, gid in MARKERS:
        (pt,) = ax.plot([tau.real], [tau.imag], "o", color="black", ms=4)
        pt.set_gid(gid)
        txt = ax.annotate(label, (tau.real, tau.imag), xytext=(5, 4), textcoords="offset points")
        txt.set_gid(gid.replace("marker", "label"))
    ax.set_xticks([-0.5, 0.0, 0.5])
    ax.set_yticks([0.5, 1.0, 1.5, 2.0])
    ax.set_xlim(extent[0], extent[1])
    ax.set_ylim(extent[2], extent[3])
    ax.set_xlabel(r"Re $\tau$")
    ax.set_ylabel(r"Im $\tau$")
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def render_region(m: TauRegionMap, fmt: str, path) -> None:
    if fmt == "csv":
        Path(path).write_text(region_csv(m))
    elif fmt == "svg":
        region_svg(m, path)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'svg'")


def metric_svg(x: np.ndarray, y: np.ndarray, u: np.ndarray, path, title: str = "") -> None:
    """Heat map of ``u`` in lattice coordinates of the fundamental cell."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    im = ax.pcolormesh(x, y, u, shading="nearest", cmap="viridis")
    fig.colorbar(im, ax=ax, label="u")
    ax.set_xlabel("s  (z = s + t tau)")
    ax.set_ylabel("t")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)
