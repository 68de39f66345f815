"""The antimeromorphic map ``g(z) = -(conj(zeta(z)) + conj(A z)) / B``.

Fixed points of ``g`` are exactly the zeros of ``R(a) = A a + B conj(a) +
zeta(a)``: ``z - g(z) = conj(R(z)) / B``.  ``g`` commutes with lattice
translations, so orbits are followed on the torus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .elliptic import POLE_RADIUS, _check_points, _evaluate, lattice_distance
from .errors import AuditFailed, DegenerateCriticalPoint, NotAFixedPoint
from .green import (
    NEUTRAL_BAND,
    AntiEquationConstants,
    CriticalPointReport,
    Stability,
    constants_AB,
    residual_R,
)
from .lattice import TorusLattice, reduce_point, reduce_points


class OrbitStatus(str, enum.Enum):
    CONVERGED = "converged_to_fixed_point"
    MAX_ITERATIONS = "max_iterations"
    POLE_HIT = "pole_hit"


@dataclass
class OrbitRecord:
    start: complex
    points: list[complex] = field(default_factory=list)
    status: OrbitStatus = OrbitStatus.MAX_ITERATIONS
    limit: complex | None = None

    def to_csv_rows(self) -> list[tuple[int, float, float]]:
        return [(k, z.real, z.imag) for k, z in enumerate(self.points)]


def g_map(z, L: TorusLattice, AB: AntiEquationConstants | None = None):
    AB = AB or constants_AB(L)
    _check_points(z, L.tau)
    z = np.asarray(z, dtype=complex)
    zt = _evaluate(z, L.tau, want_prime=False)[1]
    out = -(np.conj(zt) + np.conj(AB.A * z)) / AB.B
    return out[()] if out.ndim == 0 else out


def iterate_orbit(z0: complex, max_iter: int, L: TorusLattice, tol: float = 1e-10) -> OrbitRecord:
    """Follow ``reduce(g(z))`` from ``z0`` on the torus.

    Stops when successive iterates agree to ``tol`` modulo the lattice
    (converged), when an iterate enters the pole ball (pole_hit), or after
    ``max_iter`` steps.
    """
    AB = constants_AB(L)
    z = reduce_point(complex(z0), L)
    rec = OrbitRecord(start=complex(z0), points=[z])
    if lattice_distance(z, L.tau) < POLE_RADIUS:
        rec.status = OrbitStatus.POLE_HIT
        return rec
    for _ in range(max_iter):
        nxt = reduce_point(complex(g_map(z, L, AB)), L)
        rec.points.append(nxt)
        if lattice_distance(nxt, L.tau) < POLE_RADIUS:
            rec.status = OrbitStatus.POLE_HIT
            return rec
        if float(lattice_distance(nxt - z, L.tau)) < tol:
            rec.status = OrbitStatus.CONVERGED
            rec.limit = nxt
            return rec
        z = nxt
    rec.status = OrbitStatus.MAX_ITERATIONS
    return rec


def g_critical_points(L: TorusLattice, grid: int = 12) -> list[complex]:
    """The two solutions of ``wp(z) = A`` modulo the lattice, ``[c, -c]``.

    Raises :class:`DegenerateCriticalPoint` when the pair collides at a
    half-period (``wp'`` vanishes there).
    """
    AB = constants_AB(L)
    tau = L.tau
    # wp(z) = A has a double root exactly when wp'(z) = 0 there, i.e. when
    # A equals one of the half-period values
    scale = max(1.0, max(abs(e) for e in L.e))
    for w, e in zip(L.half_periods, L.e):
        if abs(e - AB.A) < 1e-9 * scale:
            raise DegenerateCriticalPoint(
                f"critical points of g collide at the half-period {w} (A = e_j)", at=w, tau=tau
            )
    u = (np.arange(grid) + 0.5) / grid
    x, y = np.meshgrid(u, u, indexing="ij")
    z = (x + y * tau).ravel()
    for _ in range(200):
        _, _, p, pp = _evaluate(z, tau)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (p - AB.A) / pp
        step = np.where(np.isfinite(step), step, 0.0)
        # Newton on wp - A can overshoot into a pole; cap the step length
        big = np.abs(step) > 0.25
        step = np.where(big, 0.25 * step / np.abs(np.where(big, step, 1.0)), step)
        z = reduce_points(z - step, tau)
        z = np.where(lattice_distance(z, tau) < POLE_RADIUS, z + 0.1 + 0.1j, z)
        if np.all(np.abs(step) < 1e-15):
            break
    _, _, p, pp = _evaluate(z, tau)
    scale = max(1.0, abs(AB.A))
    found: list[complex] = []
    for c, val in zip(z, np.abs(p - AB.A)):
        if not val < 1e-10 * scale:
            continue
        c = reduce_point(complex(c), L)
        if not any(float(lattice_distance(c - b, tau)) < 1e-7 for b in found):
            found.append(c)
    if len(found) == 1:
        c = found[0]
        raise DegenerateCriticalPoint(
            f"critical points of g collide at {c} (wp'(c) = 0)", at=c, tau=tau
        )
    if len(found) != 2:
        raise DegenerateCriticalPoint(
            f"expected 2 solutions of wp(z) = A modulo the lattice, found {len(found)}",
            tau=tau,
            count=len(found),
        )
    c1, c2 = found
    # order as (c, -c) with c the one of smaller real part
    if (c2.real, c2.imag) < (c1.real, c1.imag):
        c1, c2 = c2, c1
    return [c1, c2]


def classify_fixed_point(
    a: complex, L: TorusLattice, AB: AntiEquationConstants | None = None
) -> tuple[Stability, float, int]:
    """``(stability, multiplier_modulus, orientation_sign)`` at a fixed point.

    The multiplier modulus is ``|dg/dconj(z)| = |wp(a) - A| / |B|``;
    orientation of ``phi = z - g`` is preserved iff it is below one.
    """
    AB = AB or constants_AB(L)
    a = complex(a)
    r = abs(complex(residual_R(a, L, AB)))
    if not r < 1e-8:
        raise NotAFixedPoint(f"|R(a)| = {r:.3e} at a = {a}", at=a, residual=r)
    p = complex(_evaluate(a, L.tau, want_prime=False)[2])
    mod = abs(p - AB.A) / abs(AB.B)
    if mod < 1.0 - NEUTRAL_BAND:
        stability = Stability.ATTRACTING
    elif mod > 1.0 + NEUTRAL_BAND:
        stability = Stability.REPELLING
    else:
        stability = Stability.INDETERMINATE
    orient = 1 if mod < 1.0 else -1
    return stability, float(mod), orient


def degree_audit(report: CriticalPointReport | tuple[int, int], raise_on_fail: bool = False) -> bool:
    """Check ``n_plus - n_minus == -1``, ``n_plus <= 2`` and ``n_minus <= 3``.

    Accepts a report or a bare ``(n_plus, n_minus)`` pair.
    """
    if isinstance(report, tuple):
        n_plus, n_minus = report
    else:
        if report.boundary_indeterminate:
            raise ValueError("degree audit is undefined when a fixed point is indeterminate")
        n_plus, n_minus = report.n_plus, report.n_minus
    ok = n_plus - n_minus == -1 and n_plus <= 2 and n_minus <= 3
    if not ok and raise_on_fail:
        raise AuditFailed(
            f"degree audit failed: n_plus={n_plus}, n_minus={n_minus}",
            n_plus=n_plus,
            n_minus=n_minus,
        )
    return ok
