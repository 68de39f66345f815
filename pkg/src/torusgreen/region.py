"""Where in the tau half-plane does the Green's function have five critical points?

For ``j = 1, 2, 3`` the flag ``f_j`` is the inequality

    Im( pi*i / (e_j*omega1^2 + eta1*omega1) - 2*tau ) < 0,

and ``in_region = f_1 and f_2 and f_3``.  Algebraically ``f_j`` is the
statement that the trivial critical point with p-value ``e_j`` is a
repelling fixed point of ``g`` (``|e_j - A| > |B|``); :func:`cross_validate`
checks both readings against an actual root count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .elliptic import PI
from .errors import BoundaryIndeterminate, SolverIncomplete
from .green import NEUTRAL_BAND, Kind, Stability, constants_AB, solve_critical_points
from .lattice import TorusLattice, lattice_from_tau

IM_FLOOR = 0.05


def _flags(L: TorusLattice) -> tuple[bool, bool, bool]:
    w1 = L.omega1
    out = []
    for e in L.e:
        val = PI * 1j / (e * w1 * w1 + L.eta1 * w1) - 2 * L.tau
        out.append(bool(val.imag < 0))
    return tuple(out)


def ineq_holds(tau) -> tuple[bool, bool, bool]:
    return _flags(lattice_from_tau(tau))


def trivial_multipliers(L: TorusLattice) -> tuple[float, float, float]:
    """``|e_j - A| / |B|`` for the three half-periods."""
    AB = constants_AB(L)
    return tuple(abs(e - AB.A) / abs(AB.B) for e in L.e)


@dataclass(frozen=True)
class CrossValidation:
    tau: complex
    flags: tuple[bool, bool, bool]
    in_region: bool
    count: int
    n_plus: int
    n_minus: int
    all_trivial_repelling: bool
    moduli_repelling: bool
    boundary_band: bool
    solver_complete: bool
    consistent: bool
    locations: tuple[complex, ...] = ()

    def to_json(self) -> dict:
        return {
            "tau": [self.tau.real, self.tau.imag],
            "flags": list(self.flags),
            "in_region": self.in_region,
            "count": self.count,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "all_trivial_repelling": self.all_trivial_repelling,
            "boundary_band": self.boundary_band,
            "consistent": self.consistent,
        }


def cross_validate(tau, grid: int = 24) -> CrossValidation:
    """Compare the inequality flags with the solver count and the classification.

    ``consistent`` requires ``in_region == (count == 5) == all trivial
    repelling``, unless the sample lies in the neutral boundary band.
    """
    L = lattice_from_tau(tau)
    flags = _flags(L)
    in_region = all(flags)
    mults = trivial_multipliers(L)
    moduli_repelling = all(m > 1.0 for m in mults)
    boundary = any(abs(m - 1.0) < NEUTRAL_BAND for m in mults)
    complete = True
    try:
        report = solve_critical_points(L, grid=grid)
    except BoundaryIndeterminate as exc:
        report = exc.report
        boundary = True
    except SolverIncomplete as exc:
        report = exc.report
        complete = False
    trivial = [p for p in report.points if p.kind is Kind.TRIVIAL]
    all_rep = len(trivial) == 3 and all(p.stability is Stability.REPELLING for p in trivial)
    count = report.total
    consistent = boundary or (complete and in_region == (count == 5) == all_rep)
    return CrossValidation(
        tau=complex(tau),
        flags=flags,
        in_region=in_region,
        count=count,
        n_plus=report.n_plus,
        n_minus=report.n_minus,
        all_trivial_repelling=all_rep,
        moduli_repelling=moduli_repelling,
        boundary_band=boundary,
        solver_complete=complete,
        consistent=consistent,
        locations=tuple(p.location for p in report.points),
    )


@dataclass
class TauRegionMap:
    """Samples on the grid ``re[i] + 1j*im[j]``; arrays are indexed ``[j, i]``."""

    re: np.ndarray
    im: np.ndarray
    evaluated: np.ndarray
    flags: np.ndarray  # (ny, nx, 3) bool
    in_region: np.ndarray
    boundary_band: np.ndarray
    solver_count: np.ndarray | None = None  # -1 where not evaluated
    checks: list | None = None  # CrossValidation per sample, row-major

    @property
    def shape(self) -> tuple[int, int]:
        return self.in_region.shape

    def region_fraction(self) -> float:
        n = int(self.evaluated.sum())
        return float(self.in_region[self.evaluated].sum()) / n if n else math.nan


def _scan_row(im: float, re: np.ndarray, cross: bool, grid: int):
    n = re.size
    flags = np.zeros((n, 3), dtype=bool)
    band = np.zeros(n, dtype=bool)
    count = np.full(n, -1, dtype=int)
    checks: list = [None] * n
    if im < IM_FLOOR:
        return False, flags, band, count, checks
    for i, x in enumerate(re):
        tau = complex(float(x), float(im))
        if cross:
            cv = cross_validate(tau, grid=grid)
            flags[i] = cv.flags
            band[i] = cv.boundary_band
            count[i] = cv.count
            checks[i] = cv
        else:
            L = lattice_from_tau(tau)
            flags[i] = _flags(L)
            band[i] = any(abs(m - 1.0) < NEUTRAL_BAND for m in trivial_multipliers(L))
    return True, flags, band, count, checks


def scan_region(
    window: tuple[float, float, float, float] = (-0.5, 0.5, 0.05, 2.0),
    resolution: tuple[int, int] = (200, 200),
    cross_validate: bool = False,
    threads: int = 1,
    grid: int = 24,
) -> TauRegionMap:
    """Evaluate the inequality flags on a rectangular grid of tau values.

    ``window = (re_min, re_max, im_min, im_max)`` and
    ``resolution = (nx, ny)``; both ends of each range are grid nodes.  Rows
    with ``Im(tau) < 0.05`` are left unevaluated.  Rows may be processed
    on ``threads`` worker threads; results are assembled by index, so the
    output does not depend on scheduling.
    """
    re_min, re_max, im_min, im_max = window
    nx, ny = resolution
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be positive")
    if im_max <= 0:
        raise ValueError("window must lie in the upper half-plane")
    re = np.linspace(re_min, re_max, nx)
    im = np.linspace(im_min, im_max, ny)
    work = [(float(y), re, cross_validate, grid) for y in im]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda args: _scan_row(*args), work))
    else:
        rows = [_scan_row(*args) for args in work]

    evaluated = np.zeros((ny, nx), dtype=bool)
    flags = np.zeros((ny, nx, 3), dtype=bool)
    band = np.zeros((ny, nx), dtype=bool)
    count = np.full((ny, nx), -1, dtype=int)
    checks = []
    for j, (ok, f, b, c, ch) in enumerate(rows):
        evaluated[j] = ok
        flags[j] = f
        band[j] = b
        count[j] = c
        checks.extend(ch)
    in_region = flags.all(axis=-1) & evaluated
    return TauRegionMap(
        re=re,
        im=im,
        evaluated=evaluated,
        flags=flags,
        in_region=in_region,
        boundary_band=band,
        solver_count=count if cross_validate else None,
        checks=checks if cross_validate else None,
    )


def region_boundary_distance(in_region: np.ndarray) -> np.ndarray:
    """Chebyshev distance (in cells) from each sample to the nearest sample of opposite class."""
    from scipy import ndimage

    inside = ndimage.distance_transform_cdt(in_region, metric="chessboard")
    outside = ndimage.distance_transform_cdt(~in_region, metric="chessboard")
    # distance_transform_cdt measures the distance to the nearest zero
    return np.where(in_region, inside, outside)
