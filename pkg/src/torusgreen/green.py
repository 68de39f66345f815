"""Green's function of the flat torus and its critical points.

The critical points of ``G`` are the zeros of

    R(a) = A*a + B*conj(a) + zeta(a),

where ``A`` and ``B`` are the unique constants making ``R`` invariant under
``a -> a + 2*omega_j`` (``zeta`` then shifts by ``2*eta_j``).  Writing
``R`` as a map of the real plane, its Jacobian determinant is
``|A - wp(a)|^2 - B^2``; the sign of this determinant is the orientation
count used by the degree argument, so the solver and the classification
share one computation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import elliptic
from .elliptic import PI, POLE_RADIUS, _check_points, _evaluate, lattice_distance
from .errors import BoundaryIndeterminate, SolverIncomplete
from .lattice import TorusLattice, cpair, reduce_point, reduce_points

RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-7
TRIVIAL_TOL = 1e-8
NEUTRAL_BAND = 1e-4


class Kind(str, enum.Enum):
    TRIVIAL = "trivial_halfperiod"
    NONTRIVIAL = "nontrivial"


class Stability(str, enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class AntiEquationConstants:
    A: complex
    B: float


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    kind: Kind
    stability: Stability
    multiplier_modulus: float
    orientation_sign: int
    residual_norm: float

    def to_json(self) -> dict:
        return {
            "a": cpair(self.location),
            "kind": self.kind.value,
            "stability": self.stability.value,
            "multiplier_modulus": self.multiplier_modulus,
            "orientation": self.orientation_sign,
            "residual": self.residual_norm,
        }


@dataclass
class CriticalPointReport:
    lattice: TorusLattice
    points: list[CriticalPoint] = field(default_factory=list)
    n_plus: int = 0
    n_minus: int = 0
    total: int = 0
    grid: int = 0

    @property
    def nontrivial(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.kind is Kind.NONTRIVIAL]

    @property
    def trivial(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.kind is Kind.TRIVIAL]

    @property
    def boundary_indeterminate(self) -> bool:
        return any(p.stability is Stability.INDETERMINATE for p in self.points)

    def to_json(self) -> dict:
        return {
            "tau": cpair(self.lattice.tau),
            "total": self.total,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "points": [p.to_json() for p in self.points],
        }


def _reduce_centered(z, tau: complex):
    z = np.asarray(z, dtype=complex)
    n = np.floor(z.imag / tau.imag + 0.5)
    z0 = z - n * tau
    return z0 - np.floor(z0.real + 0.5)


def green_value(z, L: TorusLattice, C: float = 0.0):
    """``G(z) = -log|theta1(z)|/(2 pi) + (Im z)^2/(2 Im tau) + C``.

    ``G`` is doubly periodic, so ``z`` is first moved to the period
    parallelogram centred at the origin; this keeps the theta series
    well-conditioned.
    """
    _check_points(z, L.tau)
    z0 = _reduce_centered(z, L.tau)
    th = elliptic.theta1(z0, L.tau)
    g = -np.log(np.abs(th)) / (2 * PI) + z0.imag**2 / (2 * L.tau.imag) + C
    return g[()] if np.ndim(g) == 0 else g


def green_grad(z, L: TorusLattice, h: float = 1e-6, C: float = 0.0) -> complex:
    """Central-difference gradient ``G_x + i G_y`` of :func:`green_value`."""
    z = complex(z)
    _check_points(z, L.tau, radius=POLE_RADIUS + h)
    stencil = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    g = green_value(stencil, L, C)
    return complex((g[0] - g[1]) / (2 * h), (g[2] - g[3]) / (2 * h))


def constants_AB(L: TorusLattice) -> AntiEquationConstants:
    w1 = L.omega1
    im = L.tau.imag
    A = PI / (4 * w1 * w1 * im) - L.eta1 / w1
    B = -PI / (4 * abs(w1) ** 2 * im)
    return AntiEquationConstants(A=complex(A), B=float(B))


def residual_R(a, L: TorusLattice, AB: AntiEquationConstants | None = None):
    AB = AB or constants_AB(L)
    _check_points(a, L.tau)
    a = np.asarray(a, dtype=complex)
    zt = _evaluate(a, L.tau, want_prime=False)[1]
    r = AB.A * a + AB.B * np.conj(a) + zt
    return r[()] if r.ndim == 0 else r


def _residual_and_slope(a: np.ndarray, L: TorusLattice, AB: AntiEquationConstants):
    _, zt, p, _ = _evaluate(a, L.tau, want_prime=False)
    return AB.A * a + AB.B * np.conj(a) + zt, AB.A - p


def _newton(seeds: np.ndarray, L: TorusLattice, AB: AntiEquationConstants, max_iter: int = 80):
    """Damped Newton on the real 2-D system, all seeds at once.

    Solving ``P*d + B*conj(d) = -R`` for ``d`` with ``P = A - wp(a)`` gives
    ``d = (B*conj(R) - conj(P)*R) / (|P|^2 - B^2)``.
    """
    tau = L.tau
    B = AB.B
    a = reduce_points(seeds, tau)
    R, P = _residual_and_slope(a, L, AB)
    res = np.abs(R)
    active = np.isfinite(res)
    for _ in range(max_iter):
        active &= res > 1e-13
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Ra, Pa = R[idx], P[idx]
        det = np.abs(Pa) ** 2 - B * B
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (B * np.conj(Ra) - np.conj(Pa) * Ra) / det
        t = np.ones(idx.size)
        pending = np.isfinite(step)
        new_a = a[idx].copy()
        new_R, new_P, new_res = Ra.copy(), Pa.copy(), res[idx].copy()
        stalled = ~pending
        for _k in range(20):
            if not pending.any():
                break
            j = np.flatnonzero(pending)
            trial = reduce_points(new_a[j] + t[j] * step[j], tau)
            far = lattice_distance(trial, tau) > POLE_RADIUS
            Rt, Pt = _residual_and_slope(trial, L, AB)
            rt = np.abs(Rt)
            ok = far & np.isfinite(rt) & (rt < res[idx][j])
            acc = j[ok]
            new_a[acc], new_R[acc], new_P[acc], new_res[acc] = trial[ok], Rt[ok], Pt[ok], rt[ok]
            pending[acc] = False
            t[j[~ok]] *= 0.5
        stalled |= pending
        a[idx], R[idx], P[idx], res[idx] = new_a, new_R, new_P, new_res
        active[idx[stalled]] = False
    return a, res


def _classify_kind(a: complex, L: TorusLattice) -> Kind:
    for w in L.half_periods:
        if float(lattice_distance(a - w, L.tau)) < TRIVIAL_TOL:
            return Kind.TRIVIAL
    return Kind.NONTRIVIAL


def _seed_grid(n: int, tau: complex) -> np.ndarray:
    u = (np.arange(n) + 0.5) / n
    x, y = np.meshgrid(u, u, indexing="ij")
    z = (x + y * tau).ravel()
    return z[lattice_distance(z, tau) > 5 * POLE_RADIUS]


def _sort_key(p: CriticalPoint, L: TorusLattice):
    if p.kind is Kind.TRIVIAL:
        for i, w in enumerate(L.half_periods):
            if float(lattice_distance(p.location - w, L.tau)) < TRIVIAL_TOL:
                return (0, i, 0.0, 0.0)
    return (1, 0, round(p.location.real, 9), round(p.location.imag, 9))


def _is_new(a: complex, roots: list[complex], tau: complex) -> bool:
    if not roots:
        return True
    return bool(np.all(lattice_distance(a - np.asarray(roots), tau) >= DEDUP_TOL))


def _collect_roots(roots: list[complex], cand: np.ndarray, res: np.ndarray, L: TorusLattice, AB):
    ok = res < RESIDUAL_TOL
    cand = cand[ok]
    if cand.size == 0:
        return
    # Newton "roots" with a numerically singular Jacobian are not isolated
    # (thin tori make R flat to round-off along whole segments).
    p = _evaluate(cand, L.tau, want_prime=False)[2]
    cond = np.abs(np.abs(AB.A - p) ** 2 / AB.B**2 - 1.0)
    for a in cand[cond > 1e-8]:
        a = complex(a)
        if _is_new(a, roots, L.tau):
            roots.append(a)


def _polish(a: complex, L: TorusLattice, AB: AntiEquationConstants) -> complex:
    """A few extra Newton steps on a single root."""
    out, _ = _newton(np.array([a]), L, AB, max_iter=4)
    return reduce_point(complex(out[0]), L)


def solve_critical_points(
    L: TorusLattice,
    grid: int = 24,
    max_grid: int = 96,
    strict: bool = True,
) -> CriticalPointReport:
    """All zeros of :func:`residual_R` on the torus.

    Seeds a ``grid x grid`` lattice of starting points in the fundamental
    parallelogram, runs damped Newton from each, and identifies roots that
    agree modulo the lattice.  If the orientation count violates
    ``n_plus - n_minus = -1`` the grid is doubled (up to ``max_grid``).

    With ``strict`` set, raises :class:`BoundaryIndeterminate` when some
    fixed point is numerically neutral and :class:`SolverIncomplete` when
    the degree identity still fails at ``max_grid``; both carry the report.
    """
    from .dynamics import classify_fixed_point

    AB = constants_AB(L)
    # The half-periods are exact zeros of R; they are kept whenever the
    # evaluated residual confirms it.
    trivial = [reduce_point(w, L) for w in L.half_periods]
    trivial = [w for w in trivial if abs(complex(residual_R(w, L, AB))) < RESIDUAL_TOL]
    found: list[complex] = []
    n = grid
    while True:
        cand, res = _newton(_seed_grid(n, L.tau), L, AB)
        _collect_roots(found, cand, res, L, AB)
        roots = list(trivial)
        for a in found:
            a = _polish(a, L, AB)
            if _is_new(a, roots, L.tau):
                roots.append(a)
        points = []
        for a in roots:
            stability, mod, orient = classify_fixed_point(a, L, AB=AB)
            points.append(
                CriticalPoint(
                    location=a,
                    kind=_classify_kind(a, L),
                    stability=stability,
                    multiplier_modulus=mod,
                    orientation_sign=orient,
                    residual_norm=float(abs(residual_R(a, L, AB))),
                )
            )
        points.sort(key=lambda p: _sort_key(p, L))
        n_plus = sum(1 for p in points if p.orientation_sign > 0)
        n_minus = len(points) - n_plus
        report = CriticalPointReport(
            lattice=L, points=points, n_plus=n_plus, n_minus=n_minus, total=len(points), grid=n
        )
        if n_plus - n_minus == -1 or 2 * n > max_grid:
            break
        n *= 2

    if strict and report.boundary_indeterminate:
        worst = min(points, key=lambda p: abs(p.multiplier_modulus - 1.0))
        raise BoundaryIndeterminate(
            f"fixed point {worst.location} has multiplier modulus "
            f"{worst.multiplier_modulus:.8f}, within {NEUTRAL_BAND:g} of 1",
            report=report,
            tau=L.tau,
        )
    if strict and report.n_plus - report.n_minus != -1:
        raise SolverIncomplete(
            f"degree identity failed after {report.grid}x{report.grid} seeding: "
            f"n_plus={report.n_plus}, n_minus={report.n_minus}",
            report=report,
            tau=L.tau,
            n_plus=report.n_plus,
            n_minus=report.n_minus,
        )
    return report


def multiplier_modulus(a: complex, L: TorusLattice, AB: AntiEquationConstants | None = None) -> float:
    """``|wp(a) - A| / |B|``, the modulus of the antiholomorphic derivative of g."""
    AB = AB or constants_AB(L)
    p = complex(_evaluate(complex(a), L.tau, want_prime=False)[2])
    return abs(p - AB.A) / abs(AB.B)


__all__ = [
    "AntiEquationConstants",
    "CriticalPoint",
    "CriticalPointReport",
    "Kind",
    "Stability",
    "constants_AB",
    "green_grad",
    "green_value",
    "multiplier_modulus",
    "residual_R",
    "solve_critical_points",
]

