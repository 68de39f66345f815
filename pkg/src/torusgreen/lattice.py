"""Normalised torus lattices ``{m + n*tau}`` and point reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elliptic
from .errors import NonFiniteInput


def cpair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class TorusLattice:
    """Lattice with half-periods ``omega1 = 1/2`` and ``omega2 = tau/2``.

    ``e1, e2, e3`` are the values of the Weierstrass p-function at
    ``omega1``, ``omega2`` and ``omega1 + omega2``, in that order.
    """

    tau: complex
    omega1: complex
    omega2: complex
    eta1: complex
    eta2: complex
    e1: complex
    e2: complex
    e3: complex
    g2: complex
    g3: complex
    area: float

    @property
    def e(self) -> tuple[complex, complex, complex]:
        return (self.e1, self.e2, self.e3)

    @property
    def half_periods(self) -> tuple[complex, complex, complex]:
        return (self.omega1, self.omega2, self.omega1 + self.omega2)

    def to_json(self) -> dict:
        return {
            "tau": cpair(self.tau),
            "eta1": cpair(self.eta1),
            "eta2": cpair(self.eta2),
            "e": [cpair(x) for x in self.e],
            "g2": cpair(self.g2),
            "g3": cpair(self.g3),
            "area": self.area,
        }


def lattice_from_tau(tau) -> TorusLattice:
    tau = elliptic.check_tau(tau)
    omega1 = 0.5 + 0j
    omega2 = tau / 2
    eta1, eta2 = elliptic.quasi_periods(tau)
    pts = np.array([omega1, omega2, omega1 + omega2])
    e1, e2, e3 = (complex(x) for x in elliptic._evaluate(pts, tau, want_prime=False)[2])
    g2 = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1)
    g3 = 4.0 * e1 * e2 * e3
    area = 4.0 * abs((omega1.conjugate() * omega2).imag)
    return TorusLattice(
        tau=tau,
        omega1=omega1,
        omega2=omega2,
        eta1=eta1,
        eta2=eta2,
        e1=e1,
        e2=e2,
        e3=e3,
        g2=g2,
        g3=g3,
        area=area,
    )


def _reduce_once(z: complex, tau: complex) -> complex:
    y = z.imag / tau.imag
    x = z.real - y * tau.real
    x -= math.floor(x)
    y -= math.floor(y)
    # x - floor(x) rounds to 1.0 for tiny negative x
    if x >= 1.0:
        x = 0.0
    if y >= 1.0:
        y = 0.0
    return complex(x + y * tau.real, y * tau.imag)


def reduce_point(z, L: TorusLattice) -> complex:
    """Representative of ``z`` in ``[0, 1) + [0, 1)*tau``.

    The result is a fixed point of the reduction, so reducing twice returns
    the identical float.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteInput(f"z must be finite, got {z!r}", z=z)
    w = _reduce_once(z, L.tau)
    for _ in range(4):
        nxt = _reduce_once(w, L.tau)
        if nxt == w:
            break
        w = nxt
    return w


def reduce_points(z, tau: complex) -> np.ndarray:
    """Vectorised reduction to ``[0, 1) + [0, 1)*tau`` (no idempotency pass)."""
    z = np.asarray(z, dtype=complex)
    y = z.imag / tau.imag
    x = z.real - y * tau.real
    x = x - np.floor(x)
    y = y - np.floor(y)
    x = np.where(x >= 1.0, 0.0, x)
    y = np.where(y >= 1.0, 0.0, y)
    return x + y * tau


def lattice_offset(z, L: TorusLattice) -> float:
    """Distance from ``z`` to the nearest lattice point."""
    return float(elliptic.lattice_distance(complex(z), L.tau))
