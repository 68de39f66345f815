"""Jacobi theta and Weierstrass functions for the lattice Z + Z*tau.

Conventions: the half-periods are ``omega1 = 1/2`` and ``omega2 = tau/2``.
``theta1(z, tau)`` denotes the classical theta function in the variable
``pi*z``, so its zeros are exactly the lattice points ``m + n*tau``.

The Weierstrass functions are evaluated through theta logarithmic
derivatives.  Because they depend only on the lattice and not on the chosen
basis, evaluation first moves ``tau`` into the standard modular fundamental
domain (nome at most ``exp(-pi*sqrt(3)/2) ~ 0.066``) and rescales; the
point ``z`` is then reduced to the period parallelogram centred at the
origin and the quasi-periodicity of ``zeta``/``sigma`` is applied
analytically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .errors import InvalidTau, NonFiniteInput, PoleProximity, PrecisionWarning

if TYPE_CHECKING:  # pragma: no cover
    from .lattice import TorusLattice

PI = math.pi
POLE_RADIUS = 1e-3
PRECISION_IM_FLOOR = 0.05

# With tau reduced, |q| <= 0.0659 and |Im z| <= Im(tau)/2, so the n-th term of
# every series used below is bounded by 1331 * exp(-pi*sqrt(3)/2*(n^2 - 1/4));
# n = 0..7 leaves the truncation error below 1e-60.
_N_TERMS = 8


def check_tau(tau) -> complex:
    tau = complex(tau)
    if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
        raise NonFiniteInput(f"tau must be finite, got {tau!r}", tau=tau)
    if tau.imag <= 0:
        raise InvalidTau("Im(tau) must be positive", tau=tau)
    return tau


def theta1(z, tau):
    """First Jacobi theta function, summed directly from its q-series.

    ``theta1(z, tau) = 2 * sum_{n>=0} (-1)^n q^((n+1/2)^2) sin((2n+1) pi z)``
    with ``q = exp(i pi tau)``.  Summation stops once two consecutive terms
    are below ``1e-16`` of the running sum.  No modular transformation is
    applied, so accuracy degrades as ``Im(tau) -> 0``; a
    :class:`PrecisionWarning` is issued below ``Im(tau) = 0.05``.
    """
    tau = check_tau(tau)
    if tau.imag < PRECISION_IM_FLOOR:
        warnings.warn(
            f"theta1: Im(tau) = {tau.imag:g} < {PRECISION_IM_FLOOR}; "
            "q-series loses precision",
            PrecisionWarning,
            stacklevel=2,
        )
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("z must be finite")
    total = np.zeros_like(z)
    small_run = 0
    n = 0
    while n < 10_000:
        m = n + 0.5
        sign = -1.0 if n % 2 else 1.0
        term = 2.0 * sign * np.exp(1j * PI * tau * m * m) * np.sin((2 * n + 1) * PI * z)
        total = total + term
        if np.all(np.abs(term) <= 1e-16 * np.abs(total)):
            small_run += 1
            if small_run == 2:
                break
        else:
            small_run = 0
        n += 1
    return total[()] if total.ndim == 0 else total


def reduce_tau(tau: complex) -> tuple[complex, tuple[int, int, int, int]]:
    """Move ``tau`` into the standard fundamental domain.

    Returns ``(tau_r, (a, b, c, d))`` with ``tau_r = (a*tau + b)/(c*tau + d)``
    and ``ad - bc = 1``.
    """
    a, b, c, d = 1, 0, 0, 1
    t = tau
    for _ in range(200):
        n = math.floor(t.real + 0.5)
        if n:
            a, b = a - n * c, b - n * d
            t = t - n
        if abs(t) < 1.0 - 1e-14:
            a, b, c, d = -c, -d, a, b
            t = -1.0 / t
        else:
            break
    t = (a * tau + b) / (c * tau + d)
    return t, (a, b, c, d)


@dataclass(frozen=True)
class _Basis:
    """Reduced basis of the lattice Z + Z*tau used for evaluation."""

    tau: complex
    tau_r: complex
    matrix: tuple[int, int, int, int]
    lam: complex  # Z + Z*tau == lam * (Z + Z*tau_r)
    coef: np.ndarray  # (-1)^n q_r^((n+1/2)^2)
    k: np.ndarray  # 2n + 1
    theta1_prime0: complex  # d/dv theta1(v | tau_r) at v = 0
    eta1_r: complex
    eta2_r: complex


@lru_cache(maxsize=8192)
def _basis(tau: complex) -> _Basis:
    tau_r, (a, b, c, d) = reduce_tau(tau)
    n = np.arange(_N_TERMS)
    k = (2 * n + 1).astype(float)
    coef = np.where(n % 2 == 0, 1.0, -1.0) * np.exp(1j * PI * tau_r * (n + 0.5) ** 2)
    t1 = 2.0 * np.sum(coef * k)
    t3 = -2.0 * np.sum(coef * k**3)
    eta1_r = -(PI**2 / 6.0) * t3 / t1
    eta2_r = eta1_r * tau_r - 1j * PI
    return _Basis(
        tau=tau,
        tau_r=tau_r,
        matrix=(a, b, c, d),
        lam=c * tau + d,
        coef=coef,
        k=k,
        theta1_prime0=complex(t1),
        eta1_r=complex(eta1_r),
        eta2_r=complex(eta2_r),
    )


def quasi_periods(tau: complex) -> tuple[complex, complex]:
    """``(eta1, eta2) = (zeta(1/2), zeta(tau/2))`` for the lattice Z + Z*tau."""
    B = _basis(check_tau(tau))
    a, b, c, d = B.matrix
    eta1 = (a * B.eta1_r - c * B.eta2_r) / B.lam
    eta2 = (-b * B.eta1_r + d * B.eta2_r) / B.lam
    return complex(eta1), complex(eta2)


def _evaluate(z, tau: complex, want_sigma: bool = False, want_prime: bool = True):
    """Vectorised ``(sigma, zeta, wp, wp_prime)``; no pole checks.

    ``sigma`` (resp. ``wp_prime``) is ``None`` unless requested.
    """
    B = _basis(tau)
    z = np.asarray(z, dtype=complex)
    w = z / B.lam
    tr = B.tau_r
    n = np.floor(w.imag / tr.imag + 0.5)
    w0 = w - n * tr
    m = np.floor(w0.real + 0.5)
    w0 = w0 - m

    v = PI * w0[..., None] * B.k
    s = np.sin(v)
    c = np.cos(v)
    T0 = 2.0 * np.sum(B.coef * s, axis=-1)
    T1 = 2.0 * np.sum(B.coef * B.k * c, axis=-1)
    T2 = -2.0 * np.sum(B.coef * B.k**2 * s, axis=-1)
    H = 2.0 * m * B.eta1_r + 2.0 * n * B.eta2_r

    # at a lattice point (T0 = 0) zeta and wp come out inf/nan; callers
    # that care check distances first, sigma itself stays exact
    with np.errstate(divide="ignore", invalid="ignore"):
        L1 = T1 / T0
        L2 = T2 / T0
        zeta = (2.0 * B.eta1_r * w0 + PI * L1 + H) / B.lam
        wp = (-2.0 * B.eta1_r - PI**2 * (L2 - L1 * L1)) / B.lam**2
        wpp = None
        if want_prime:
            T3 = -2.0 * np.sum(B.coef * B.k**3 * c, axis=-1)
            L3 = T3 / T0
            wpp = -(PI**3) * (L3 - 3.0 * L1 * L2 + 2.0 * L1**3) / B.lam**3

    sigma = None
    if want_sigma:
        parity = np.where((m + n + m * n) % 2 == 0, 1.0, -1.0)
        P = m + n * tr
        sigma_r = (T0 / (PI * B.theta1_prime0)) * np.exp(B.eta1_r * w0 * w0)
        sigma_r = sigma_r * parity * np.exp(H * (w0 + 0.5 * P))
        sigma = B.lam * sigma_r
    return sigma, zeta, wp, wpp


def lattice_distance(z, tau: complex):
    """Distance from ``z`` to the nearest point of Z + Z*tau (vectorised)."""
    z = np.asarray(z, dtype=complex)
    y = np.floor(z.imag / tau.imag + 0.5)
    z0 = z - y * tau
    z0 = z0 - np.floor(z0.real + 0.5)
    best = np.abs(z0)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            if i or j:
                best = np.minimum(best, np.abs(z0 - i - j * tau))
    return best


def _check_points(z, tau: complex, radius: float = POLE_RADIUS) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("evaluation point must be finite")
    dist = lattice_distance(z, tau)
    if np.any(dist < radius):
        bad = complex(np.ravel(z)[np.argmin(np.ravel(dist))])
        raise PoleProximity(
            f"point {bad} lies within {radius:g} of a lattice point", at=bad, radius=radius
        )
    return z


def _unwrap(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def zeta(z, L: "TorusLattice"):
    _check_points(z, L.tau)
    return _unwrap(_evaluate(z, L.tau, want_prime=False)[1])


def wp(z, L: "TorusLattice"):
    _check_points(z, L.tau)
    return _unwrap(_evaluate(z, L.tau, want_prime=False)[2])


def wp_prime(z, L: "TorusLattice"):
    _check_points(z, L.tau)
    return _unwrap(_evaluate(z, L.tau)[3])


def sigma(z, L: "TorusLattice"):
    """Weierstrass sigma.  Entire, so no pole check is made."""
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("evaluation point must be finite")
    return _unwrap(_evaluate(z, L.tau, want_sigma=True, want_prime=False)[0])


@dataclass(frozen=True)
class WeierstrassBundle:
    at: complex
    sigma: complex
    zeta: complex
    p: complex
    p_prime: complex

    def to_json(self) -> dict:
        return {
            name: [getattr(self, name).real, getattr(self, name).imag]
            for name in ("at", "sigma", "zeta", "p", "p_prime")
        }


def weierstrass(z: complex, L: "TorusLattice") -> WeierstrassBundle:
    """All four Weierstrass values at a single point ``z``."""
    z = complex(z)
    _check_points(z, L.tau)
    s, zt, p, pp = _evaluate(z, L.tau, want_sigma=True)
    return WeierstrassBundle(at=z, sigma=complex(s), zeta=complex(zt), p=complex(p), p_prime=complex(pp))
