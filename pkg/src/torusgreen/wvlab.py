"""Wiman-Valiron quantities for entire power series, plus two dynamical checks.

Everything works on ``log|a_k| + k log r`` so that series such as ``exp`` can
be examined at radii where ``M(r)`` itself overflows a double.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import TruncationInsufficient

# terms this far (in log) below the largest one are dropped from sums
_LOG_WINDOW = 60.0
TAIL_TOL = 1e-18


@dataclass(frozen=True)
class CoefficientSeries:
    """Power series ``sum a_k z^k`` truncated at index ``truncation``.

    Stored as ``log|a_k|`` (``-inf`` for vanishing coefficients) and the unit
    phase ``a_k / |a_k|``.  ``exact`` marks a polynomial, whose tail is zero
    rather than merely negligible.
    """

    log_abs: np.ndarray
    phase: np.ndarray
    label: str = "series"
    exact: bool = False

    @property
    def truncation(self) -> int:
        return self.log_abs.size - 1

    def coeff(self, k: int) -> complex:
        if k < 0 or k > self.truncation:
            return 0j
        return complex(self.phase[k] * math.exp(self.log_abs[k])) if np.isfinite(self.log_abs[k]) else 0j

    def log_terms(self, r: float) -> np.ndarray:
        k = np.arange(self.log_abs.size)
        with np.errstate(invalid="ignore"):
            return self.log_abs + k * math.log(r)

    def check_tail(self, r: float) -> None:
        """Raise unless ``|a_N| r^N / mu(r) < 1e-18`` and the central index is clear of ``N``."""
        if self.exact:
            return
        t = self.log_terms(r)
        m = float(np.max(t))
        lead = int(np.flatnonzero(t == m)[-1])
        if lead >= self.truncation - 2 or t[-1] - m >= math.log(TAIL_TOL):
            raise TruncationInsufficient(
                f"{self.label}: truncation {self.truncation} too short at r={r:g}",
                r=r,
                truncation=self.truncation,
            )

    def log_eval(self, z) -> np.ndarray:
        """Complex ``log f(z)`` (imaginary part defined modulo ``2 pi``)."""
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        finite = np.isfinite(self.log_abs)
        k_all = np.flatnonzero(finite)
        la = self.log_abs[k_all]
        ph = np.angle(self.phase[k_all])
        for idx, w in np.ndenumerate(z):
            if w == 0:
                out[idx] = complex(la[0], ph[0]) if k_all[0] == 0 else -np.inf
                continue
            lw = cmath.log(w)
            re = la + k_all * lw.real
            m = re.max()
            keep = re > m - _LOG_WINDOW
            terms = np.exp(re[keep] - m + 1j * (ph[keep] + k_all[keep] * lw.imag))
            out[idx] = m + np.log(np.sum(terms))
        return out[0] if scalar else out

    def __call__(self, z):
        return np.exp(self.log_eval(z))


def exp_series(truncation: int = 40_000) -> CoefficientSeries:
    k = np.arange(truncation + 1)
    return CoefficientSeries(-gammaln(k + 1.0), np.ones(k.size, dtype=complex), "exp")


def cosh_series(truncation: int = 40_000) -> CoefficientSeries:
    k = np.arange(truncation + 1)
    la = np.where(k % 2 == 0, -gammaln(k + 1.0), -np.inf)
    return CoefficientSeries(la, np.ones(k.size, dtype=complex), "cosh")


def polynomial_series(degree: int, pad: int = 8) -> CoefficientSeries:
    """The monomial ``z**degree``, padded with zero coefficients."""
    la = np.full(degree + pad + 1, -np.inf)
    la[degree] = 0.0
    return CoefficientSeries(la, np.ones(la.size, dtype=complex), f"polynomial({degree})", exact=True)


def series_from_file(path: str | Path, exact: bool = False) -> CoefficientSeries:
    """Read ``index re im`` lines (``#`` comments and blank lines ignored).

    Pass ``exact=True`` when the file lists a polynomial in full.
    """
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.replace(",", " ").split())
    if not rows:
        raise ValueError(f"{path}: no coefficients")
    idx = np.array([int(r[0]) for r in rows])
    if np.any(idx < 0):
        raise ValueError(f"{path}: negative index")
    vals = np.array([complex(float(r[1]), float(r[2]) if len(r) > 2 else 0.0) for r in rows])
    n = int(idx.max())
    coef = np.zeros(n + 1, dtype=complex)
    coef[idx] = vals
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(coef))
    phase = np.where(coef != 0, coef / np.where(coef != 0, np.abs(coef), 1.0), 1.0)
    return CoefficientSeries(la, phase, Path(path).name, exact=exact)


def _log_abs_fn(f) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(f, "log_eval"):
        return lambda z: np.real(f.log_eval(z))
    return lambda z: np.log(np.abs(np.asarray(f(z), dtype=complex)))


def log_max_term(r: float, s: CoefficientSeries) -> tuple[float, int]:
    """``(log mu(r), n(r))``; ties go to the largest index."""
    if not r > 0:
        raise ValueError("r must be positive")
    t = s.log_terms(r)
    m = float(np.max(t))
    tol = 1e-12 * max(1.0, abs(m))
    n = int(np.flatnonzero(t >= m - tol)[-1])
    if n >= s.truncation - 2 and not s.exact:
        raise TruncationInsufficient(
            f"{s.label}: central index {n} within 2 of truncation {s.truncation}",
            r=r,
            truncation=s.truncation,
        )
    return float(t[n]), n


def max_term(r: float, s: CoefficientSeries) -> tuple[float, int]:
    log_mu, n = log_max_term(r, s)
    with np.errstate(over="ignore"):
        return float(np.exp(log_mu)), n


def log_max_modulus(r: float, f, samples: int = 720, tol: float = 1e-10) -> tuple[float, complex]:
    """``(log M(r), z_r)`` by a coarse circle scan plus golden-section refinement.

    Among equal coarse maxima the smallest angle wins, and the refined angle
    is kept only if it strictly improves on the coarse one.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    lf = _log_abs_fn(f)
    theta = 2 * math.pi * np.arange(samples) / samples
    vals = np.asarray(lf(r * np.exp(1j * theta)), dtype=float)
    vmax = float(np.max(vals))
    eq_tol = 1e-12 * max(1.0, abs(vmax))
    k = int(np.flatnonzero(vals >= vmax - eq_tol)[0])
    best_t, best_v = float(theta[k]), float(vals[k])

    step = 2 * math.pi / samples
    lo, hi = best_t - step, best_t + step
    g = (math.sqrt(5) - 1) / 2

    def val(t):
        return float(np.real(lf(np.array([r * cmath.exp(1j * t)])))[0])

    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = val(c), val(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = val(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = val(d)
    t_ref = 0.5 * (lo + hi)
    v_ref = val(t_ref)
    if v_ref > best_v + eq_tol:
        best_t, best_v = math.fmod(t_ref, 2 * math.pi), v_ref
        if best_t < 0:
            best_t += 2 * math.pi
    return best_v, r * cmath.exp(1j * best_t)


def max_modulus(r: float, f, samples: int = 720) -> tuple[float, complex]:
    log_m, zr = log_max_modulus(r, f, samples)
    with np.errstate(over="ignore"):
        return float(np.exp(log_m)), zr


def macintyre_a(r: float, f, dr: float | None = None) -> float:
    """``r M'(r)/M(r)`` as a central difference of ``log M`` in ``log r``."""
    if dr is None:
        dr = 1e-4 * r
    if not (r > dr > 0):
        raise ValueError("need r > dr > 0")
    h = dr / r
    up, _ = log_max_modulus(r * math.exp(h), f)
    down, _ = log_max_modulus(r * math.exp(-h), f)
    return (up - down) / (2 * h)


def disk_samples(center: complex, radius: float, n: int = 200) -> np.ndarray:
    """Deterministic sunflower pattern on the closed disk (centre and rim included)."""
    k = np.arange(n)
    rho = radius * np.sqrt(k / (n - 1))
    phi = k * math.pi * (3 - math.sqrt(5))
    return center + rho * np.exp(1j * phi)


@dataclass(frozen=True)
class WVSnapshot:
    r: float
    mu: float
    n: int
    M: float
    z_r: complex
    a: float
    disk_radius: float
    approx_error: float
    log_mu: float
    log_M: float

    CSV_HEADER = ("r", "mu", "n", "M", "zr_re", "zr_im", "a", "disk_radius", "approx_error", "log_mu", "log_M")

    def csv_row(self) -> tuple:
        return (self.r, self.mu, self.n, self.M, self.z_r.real, self.z_r.imag, self.a,
                self.disk_radius, self.approx_error, self.log_mu, self.log_M)


def wv_approx_error(r: float, eps: float, s: CoefficientSeries, n_points: int = 200) -> float:
    return snapshot(r, eps, s, n_points).approx_error


def snapshot(r: float, eps: float, s: CoefficientSeries, n_points: int = 200) -> WVSnapshot:
    """All Wiman-Valiron quantities at radius ``r``.

    ``approx_error`` is the largest ``|f(z) / ((z/z_r)^a f(z_r)) - 1|`` over
    ``n_points`` points of the disk ``|z - z_r| <= r / a^(1/2 + eps)``.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    s.check_tail(r)
    log_mu, n = log_max_term(r, s)
    log_m, zr = log_max_modulus(r, s)
    # log M is exactly linear in log r for monomials, so only rounding
    # matters there; dr = 1e-3 r keeps it below 1e-13 while the central
    # difference bias for exp stays ~2e-7 relative.
    a = macintyre_a(r, s, dr=1e-3 * r)
    radius = r / a ** (0.5 + eps)
    z = disk_samples(zr, radius, n_points)
    lf = s.log_eval(z)
    lzr = complex(s.log_eval(np.array([zr]))[0])
    expo = lf - lzr - a * np.log(z / zr)
    err = float(np.max(np.abs(np.expm1(expo))))
    with np.errstate(over="ignore"):
        mu, M = float(np.exp(log_mu)), float(np.exp(log_m))
    return WVSnapshot(r, mu, n, M, zr, a, radius, err, log_mu, log_m)


def radius_ladder(start: float, ratio: float, count: int) -> list[float]:
    return [start * ratio**k for k in range(count)]


def monomial_ring(a: float, eps: float, n_boundary: int = 2048) -> dict:
    """Image of the Wiman-Valiron disk under ``z -> (z/z_r)^a`` (with ``z_r = 1``).

    Returns the extreme log-moduli on the disk boundary, their difference, the
    span of ``a * arg(z/z_r)``, and whether that span covers a full turn.
    """
    delta = a ** (-0.5 - eps)
    z = 1.0 + delta * np.exp(2j * math.pi * np.arange(n_boundary) / n_boundary)
    logmod = a * np.log(np.abs(z))
    args = a * np.angle(z)
    width = float(logmod.max() - logmod.min())
    span = float(args.max() - args.min())
    return {
        "log_inner": float(logmod.min()),
        "log_outer": float(logmod.max()),
        "log_width": width,
        "predicted_width": 2 * a ** (0.5 - eps),
        "arg_span": span,
        "covers_ring": span >= 2 * math.pi,
    }


@dataclass
class EscapeRecord:
    start: complex
    points: list[complex] = field(default_factory=list)
    status: str = "bounded"
    iterations: int = 0
    overflow: bool = False


def escaping_orbit(f: Callable[[complex], complex], z0: complex, bound: float = 1e10, max_iter: int = 100) -> EscapeRecord:
    """Iterate ``f``; escaping means passing ``bound`` in modulus or overflowing."""
    if not bound > 1:
        raise ValueError("bound must exceed 1")
    z = complex(z0)
    rec = EscapeRecord(start=z, points=[z])
    for k in range(1, max_iter + 1):
        try:
            with np.errstate(over="raise", invalid="raise"):
                z = complex(f(z))
        except (OverflowError, FloatingPointError):
            rec.status, rec.iterations, rec.overflow = "escaped", k, True
            return rec
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            rec.status, rec.iterations, rec.overflow = "escaped", k, True
            return rec
        rec.points.append(z)
        if abs(z) > bound:
            rec.status, rec.iterations = "escaped", k
            return rec
    rec.iterations = max_iter
    return rec


@dataclass(frozen=True)
class RSSample:
    z: complex
    abs_g: float
    lhs: float | None
    rhs: float | None
    status: str  # holds | violated | vacuous

    @property
    def margin(self) -> float | None:
        return None if self.lhs is None else self.lhs - self.rhs


@dataclass
class RSReport:
    R: float
    samples: list[RSSample]

    @property
    def qualifying(self) -> int:
        return sum(1 for s in self.samples if s.status != "vacuous")

    @property
    def violations(self) -> list[RSSample]:
        return [s for s in self.samples if s.status == "violated"]

    @property
    def vacuous(self) -> int:
        return sum(1 for s in self.samples if s.status == "vacuous")


def rippon_stallard_check(g: Callable, dg: Callable, R: float, samples) -> RSReport:
    """Test ``|g(z)| > R^2  =>  |z g'(z)/g(z)| >= log|g(z)| / (16 pi)`` at each sample.

    The hypothesis that every finite critical and asymptotic value of ``g``
    lies in ``|w| <= R`` is the caller's responsibility.
    """
    out = []
    for z in samples:
        z = complex(z)
        gz = complex(g(z))
        ag = abs(gz)
        if not ag > R * R:
            out.append(RSSample(z, ag, None, None, "vacuous"))
            continue
        lhs = abs(z * complex(dg(z)) / gz)
        rhs = math.log(ag) / (16 * math.pi)
        out.append(RSSample(z, ag, lhs, rhs, "holds" if lhs >= rhs else "violated"))
    return RSReport(R=R, samples=out)
