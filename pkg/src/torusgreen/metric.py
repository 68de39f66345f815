"""Curvature-one metrics on the torus with one conic point at the origin.

A nontrivial zero ``a`` of ``R`` gives the developing map

    f(z) = c * exp(2 z zeta(a)) * sigma(z - a) / sigma(z + a),

whose multipliers ``f(z + 2 omega_j) / f(z)`` have modulus one, so the
Liouville density ``u = log(8 |f'|^2 / (1 + |f|^2)^2)`` is doubly periodic
and solves ``Laplace(u) + exp(u) = 0`` away from the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import PI, POLE_RADIUS, _evaluate, lattice_distance
from .errors import (
    FitFailure,
    NoNontrivialSolution,
    NonFiniteInput,
    PoleProximity,
    StencilSingularity,
    TrivialSolution,
)
from .green import TRIVIAL_TOL, residual_R, solve_critical_points
from .lattice import TorusLattice, lattice_from_tau

# u is log-singular only at the lattice; closer than this the log of a
# vanishing |f'| is meaningless in double precision.
SINGULAR_RADIUS = 1e-8


@dataclass(frozen=True)
class MetricSolution:
    a: complex
    c: complex
    lattice: TorusLattice

    def __post_init__(self):
        L = self.lattice
        if self.c == 0:
            raise ValueError("scale c must be nonzero")
        for w in L.half_periods:
            if float(lattice_distance(self.a - w, L.tau)) < TRIVIAL_TOL:
                raise TrivialSolution(
                    f"a = {self.a} is a half-period; f would be constant", at=self.a
                )
        r = abs(complex(residual_R(self.a, L)))
        if not r < 1e-8:
            raise ValueError(f"a = {self.a} does not solve R(a) = 0 (|R| = {r:.3e})")
        lam = multipliers(self)
        if max(abs(abs(x) - 1.0) for x in lam) >= 1e-8:
            raise ValueError(f"multipliers {lam} are not unimodular")

    @classmethod
    def from_tau(cls, tau, c: complex = 1.0) -> "MetricSolution":
        """Solve for the nontrivial critical point and wrap it (``Im a >= 0`` representative)."""
        L = lattice_from_tau(tau)
        report = solve_critical_points(L)
        nt = report.nontrivial
        if not nt:
            raise NoNontrivialSolution(
                f"tau = {L.tau} is outside the five-critical-point region", tau=L.tau
            )
        a = min((p.location for p in nt), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        return cls(a=complex(a), c=complex(c), lattice=L)


def multipliers_at(a: complex, L: TorusLattice) -> tuple[complex, complex]:
    """``lambda_j = exp(4 omega_j zeta(a) - 4 eta_j a)`` for any non-lattice ``a``."""
    a = complex(a)
    za = complex(_evaluate(a, L.tau, want_prime=False)[1])
    lam1 = np.exp(4 * L.omega1 * za - 4 * L.eta1 * a)
    lam2 = np.exp(4 * L.omega2 * za - 4 * L.eta2 * a)
    return complex(lam1), complex(lam2)


def multipliers(sol: MetricSolution) -> tuple[complex, complex]:
    return multipliers_at(sol.a, sol.lattice)


def _pieces(z, sol: MetricSolution):
    """``(log|f|, f'/f)`` at ``z``; no pole checks."""
    L = sol.lattice
    z = np.asarray(z, dtype=complex)
    za = complex(_evaluate(sol.a, L.tau, want_prime=False)[1])
    sm, zm, _, _ = _evaluate(z - sol.a, L.tau, want_sigma=True, want_prime=False)
    sp, zp, _, _ = _evaluate(z + sol.a, L.tau, want_sigma=True, want_prime=False)
    log_abs = (
        math.log(abs(sol.c))
        + 2.0 * (z * za).real
        + np.log(np.abs(sm))
        - np.log(np.abs(sp))
    )
    dlog = 2.0 * za + zm - zp
    return log_abs, dlog


def f_second_kind(z, sol: MetricSolution):
    L = sol.lattice
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("z must be finite")
    if np.any(lattice_distance(z + sol.a, L.tau) < POLE_RADIUS):
        raise PoleProximity(f"z is within {POLE_RADIUS:g} of the pole -a = {-sol.a}")
    za = complex(_evaluate(sol.a, L.tau, want_prime=False)[1])
    sm = _evaluate(z - sol.a, L.tau, want_sigma=True, want_prime=False)[0]
    sp = _evaluate(z + sol.a, L.tau, want_sigma=True, want_prime=False)[0]
    out = sol.c * np.exp(2.0 * z * za) * sm / sp
    return out[()] if out.ndim == 0 else out


def metric_u(z, sol: MetricSolution):
    """Liouville density ``log(8|f'|^2 / (1 + |f|^2)^2)``.

    Written as ``log 8 + 2 log|f'/f| - 2 log(|f| + 1/|f|)``, which is
    symmetric under ``f -> 1/f`` and therefore finite across the pole of
    ``f`` as well as its zero.
    """
    L = sol.lattice
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("z must be finite")
    if np.any(lattice_distance(z, L.tau) < SINGULAR_RADIUS):
        raise PoleProximity("u is singular at the lattice points", radius=SINGULAR_RADIUS)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs, dlog = _pieces(z, sol)
        u = math.log(8.0) + 2.0 * np.log(np.abs(dlog)) - 2.0 * np.logaddexp(log_abs, -log_abs)
    # exactly on the zero or pole of f the two logs above are infinite;
    # there u = log 8 + 2 log|f'(a)|, resp. the same with 1/f at -a
    at_zero = lattice_distance(z - sol.a, L.tau) < 1e-13
    at_pole = lattice_distance(z + sol.a, L.tau) < 1e-13
    if np.any(at_zero | at_pole):
        u = np.array(u, dtype=float)
        u[at_zero] = _u_at_root(sol, +1)
        u[at_pole] = _u_at_root(sol, -1)
    return u[()] if u.ndim == 0 else u


def _u_at_root(sol: MetricSolution, sign: int) -> float:
    """``u(a)`` (sign +1) or ``u(-a)`` (sign -1); ``sigma'(0) = 1``."""
    L = sol.lattice
    za = complex(_evaluate(sol.a, L.tau, want_prime=False)[1])
    s2a = complex(_evaluate(2 * sol.a, L.tau, want_sigma=True, want_prime=False)[0])
    # f'(a) = c exp(2 a zeta(a)) / sigma(2a);  (1/f)'(-a) = exp(2 a zeta(a)) / (-c sigma(-2a))
    log_d = 2.0 * (sol.a * za).real - math.log(abs(s2a))
    log_d += sign * math.log(abs(sol.c))
    return math.log(8.0) + 2.0 * log_d


def pde_residual(z: complex, h: float, sol: MetricSolution) -> float:
    """Five-point Laplacian of ``u`` plus ``exp(u)`` at ``z``."""
    z = complex(z)
    if float(lattice_distance(z, sol.lattice.tau)) <= 10 * h:
        raise StencilSingularity(
            f"stencil of width {h:g} at {z} comes within 10h of the cone point", at=z, h=h
        )
    pts = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
    u = metric_u(pts, sol)
    lap = (u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / (h * h)
    return float(lap + math.exp(u[0]))


def cone_exponent(sol: MetricSolution, radii, n_angles: int = 64) -> float:
    """Least-squares slope of the circular mean of ``u`` against ``log r``."""
    radii = np.asarray(radii, dtype=float)
    if radii.min() <= 100 * SINGULAR_RADIUS:
        raise FitFailure("smallest radius is too close to the cone point")
    if math.log10(radii.max() / radii.min()) < 1.0 - 1e-12:
        raise FitFailure("radii must span at least one decade")
    theta = 2 * PI * (np.arange(n_angles) + 0.5) / n_angles
    means = np.array([metric_u(r * np.exp(1j * theta), sol).mean() for r in radii])
    slope, _ = np.polyfit(np.log(radii), means, 1)
    return float(slope)


def cone_angle(sol: MetricSolution, radii=None, n_angles: int = 64) -> float:
    """Total angle at the origin, ``2 pi (1 + s/2)`` for fitted exponent ``s``.

    The metric density is ``2^{-1/2} exp(u/2) ~ |z|^{s/2}`` near the origin.
    """
    if radii is None:
        radii = np.logspace(-2, -4, 9)
    s = cone_exponent(sol, radii, n_angles)
    return 2 * PI * (1.0 + s / 2.0)


def u_grid(sol: MetricSolution, nx: int = 32, ny: int = 32):
    """``u`` at cell centres of the fundamental parallelogram ``[0,1) + [0,1) tau``.

    Returns ``(x, y, z, u)`` with ``x, y`` the lattice coordinates.
    """
    tau = sol.lattice.tau
    x = (np.arange(nx) + 0.5) / nx
    y = (np.arange(ny) + 0.5) / ny
    X, Y = np.meshgrid(x, y, indexing="xy")
    Z = X + Y * tau
    return X, Y, Z, metric_u(Z, sol)
