"""Riemann zeta on the right half-plane, polylogarithms on the unit circle,
and truncated Dirichlet series with certified tails.

Zeta uses Borwein's Chebyshev-accelerated alternating series (his
"Algorithm 2").  With ``d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)``,

    zeta(s) = -1 / (d_n (1 - 2^(1-s))) sum_{k<n} (-1)^k (d_k - d_n) (k+1)^(-s)

up to an error bounded by ``2 Gamma(sigma) / (|Gamma(s)| |1 - 2^(1-s)|)
/ (3 + sqrt 8)^n``, valid for every sigma > 0.  The weights are formed in
exact rational arithmetic.  Close to the zeros of ``1 - 2^(1-s)`` on the
line sigma = 1 the division amplifies rounding, so those points fall back
to Euler-Maclaurin summation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from ._parallel import map_chunks
from ._summation import csum, two_sum_accumulate
from .dirichlet_arith import CoeffVector
from .errors import DomainError, InsufficientDecayError, PoleError

POLE_GUARD = 1e-12
# below this |1 - 2^(1-s)| the Euler-Maclaurin route is used
ETA_FACTOR_MIN = 0.05
SAFETY = 10.0
_RHO = 3.0 + math.sqrt(8.0)
_LOG_RHO = math.log(_RHO)


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    terms_used: int


# ---------------------------------------------------------------- zeta


@lru_cache(maxsize=None)
def _borwein_weights(n: int) -> np.ndarray:
    """Float weights ``(-1)^k (d_k - d_n) / d_n`` for k = 0..n-1."""
    d = []
    total = Fraction(0)
    term = Fraction(1, n)  # (n-1)! / n! for i = 0
    for i in range(n + 1):
        if i > 0:
            term *= Fraction(4 * (n + i - 1) * (n - i + 1), (2 * i) * (2 * i - 1))
        total += term
        d.append(n * total)
    dn = d[n]
    w = np.array([float((dk - dn) / dn) for dk in d[:n]])
    w[1::2] *= -1
    w.setflags(write=False)
    return w


def _borwein_error_scale(s: np.ndarray) -> np.ndarray:
    """``2 Gamma(sigma) / (|Gamma(s)| |1 - 2^(1-s)|)`` per point."""
    sigma = s.real
    log_ratio = loggamma(sigma).real - loggamma(s).real
    factor = np.abs(1.0 - np.exp((1.0 - s) * math.log(2.0)))
    with np.errstate(divide="ignore"):
        return 2.0 * np.exp(log_ratio) / factor


def _borwein_terms(s: np.ndarray, target: float) -> np.ndarray:
    scale = _borwein_error_scale(s)
    n = np.ceil(np.log(SAFETY * scale / target) / _LOG_RHO)
    return np.maximum(n, 1).astype(int)


def _borwein_sum(s: np.ndarray, n: int) -> np.ndarray:
    w = _borwein_weights(n)
    eta = two_sum_accumulate(w[k] * np.exp(-s * math.log(k + 1)) for k in range(n))
    return -eta / (1.0 - np.exp((1.0 - s) * math.log(2.0)))


@lru_cache(maxsize=None)
def _bernoulli_even(p: int) -> tuple:
    """Exact B_2, B_4, ..., B_2p (Akiyama-Tanigawa)."""
    m_max = 2 * p
    a = [Fraction(0)] * (m_max + 1)
    out = []
    for m in range(m_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return tuple(out)


def _zeta_euler_maclaurin(s: complex, target: float):
    """Euler-Maclaurin with p correction terms; returns (value, bound, terms)."""
    p = 15
    bern = _bernoulli_even(p + 1)
    sigma = s.real
    N = max(20, int(abs(s)) + 20)
    while True:
        head = csum(np.exp(-s * np.log(np.arange(1, N, dtype=float))))
        logN = math.log(N)
        parts = [cmath.exp((1 - s) * logN) / (s - 1), 0.5 * cmath.exp(-s * logN)]
        rising = s  # s (s+1) ... (s + 2j - 2)
        for j in range(1, p + 1):
            coef = float(bern[j - 1] / math.factorial(2 * j))
            parts.append(coef * rising * cmath.exp((-s - 2 * j + 1) * logN))
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        # remainder after p terms
        coef = abs(float(bern[p] / math.factorial(2 * p + 2)))
        bound = coef * abs(rising) * abs(s + 2 * p + 1) / (sigma + 2 * p + 1) * N ** (-sigma - 2 * p - 1)
        if bound <= target or N > 10**6:
            return head + csum(parts), bound, N - 1 + p
        N *= 2


def _check_zeta_domain(s: np.ndarray) -> None:
    if np.any(~np.isfinite(s)):
        raise DomainError("zeta argument must be finite")
    if np.any(s.real <= 0):
        raise DomainError("zeta is only evaluated on Re(s) > 0")


def zeta_grid(s, target_abs_err: float = 1e-13, mask_poles: bool = True):
    """Vectorized zeta.

    Returns ``(values, tail_bounds, terms_used, masked)``; points within
    ``POLE_GUARD`` of s = 1 are NaN and flagged in ``masked`` (or raise
    :class:`PoleError` when ``mask_poles`` is false).
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    _check_zeta_domain(s)
    masked = np.abs(s - 1.0) <= POLE_GUARD
    if masked.any() and not mask_poles:
        raise PoleError("s lies within the pole guard around s = 1")
    values = np.full(s.shape, np.nan + 0j)
    bounds = np.full(s.shape, np.nan)
    terms = np.zeros(s.shape, dtype=int)

    factor = np.abs(1.0 - np.exp((1.0 - s) * math.log(2.0)))
    use_em = (factor < ETA_FACTOR_MIN) & ~masked
    use_bw = ~use_em & ~masked
    if use_bw.any():
        sb = s[use_bw]
        n = _borwein_terms(sb, target_abs_err)
        vb = np.empty(sb.shape, dtype=complex)
        for nn in np.unique(n):
            sel = n == nn
            vb[sel] = _borwein_sum(sb[sel], int(nn))
        values[use_bw] = vb
        bounds[use_bw] = _borwein_error_scale(sb) / _RHO ** n
        terms[use_bw] = n
    for i in np.flatnonzero(use_em):
        v, b, t = _zeta_euler_maclaurin(complex(s[i]), target_abs_err)
        values[i], bounds[i], terms[i] = v, b, t
    return values, bounds, terms, masked


def zeta(s: complex, target_abs_err: float = 1e-13) -> SeriesValue:
    """Riemann zeta for Re(s) > 0, s != 1."""
    v, b, t, _ = zeta_grid([s], target_abs_err, mask_poles=False)
    return SeriesValue(complex(v[0]), float(b[0]), int(t[0]))


def _zeta_real(x: float) -> float:
    """zeta at any real x != 1; negative x through the functional equation."""
    if x > 0:
        return zeta(x).value.real
    if x == 0:
        return -0.5
    if x == round(x) and round(x) % 2 == 0:
        return 0.0  # trivial zeros
    mag = math.exp(x * math.log(2 * math.pi) - math.log(math.pi) + math.lgamma(1 - x))
    return mag * math.sin(math.pi * x / 2) * zeta(1 - x).value.real


# ------------------------------------------------------------ polylog

_POLYLOG_TERMS = 100
_DIRECT_BUDGET = 10**6
_POLYLOG_TOL = 1e-13


@lru_cache(maxsize=64)
def _polylog_series(k: float):
    """Coefficients of Li_k(e^mu) = singular part + sum_m zeta(k-m) mu^m / m!."""
    kint = round(k)
    integer = abs(k - kint) < 1e-12
    coeffs = np.zeros(_POLYLOG_TERMS)
    for m in range(_POLYLOG_TERMS):
        if integer and m == kint - 1:
            continue  # carried by the logarithmic term
        x = (kint if integer else k) - m
        coeffs[m] = _zeta_real(x) / math.factorial(m) if m < 170 else 0.0
    if integer:
        harmonic = math.fsum(1.0 / j for j in range(1, kint))
        return coeffs, True, kint, harmonic
    return coeffs, False, k, math.gamma(1 - k)


def _polylog_expansion(k: float, theta: np.ndarray) -> np.ndarray:
    coeffs, integer, kk, extra = _polylog_series(k)
    mu = 1j * theta
    powers = np.ones_like(mu)
    terms = []
    for m in range(_POLYLOG_TERMS):
        if coeffs[m] != 0:
            terms.append(coeffs[m] * powers)
        powers = powers * mu
    zero = theta == 0
    safe_mu = np.where(zero, 1.0, mu)
    if integer:
        sing = safe_mu ** (kk - 1) / math.factorial(kk - 1) * (extra - np.log(-safe_mu))
    else:
        sing = extra * (-safe_mu) ** (kk - 1)
    terms.append(np.where(zero, 0.0, sing))
    out = two_sum_accumulate(terms)
    if zero.any():
        out[zero] = _zeta_real(kk)
    return out


def _polylog_direct(k: float, theta: np.ndarray, N: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=float)
    amp = n ** (-k)
    return two_sum_accumulate(amp[j] * np.exp(1j * n[j] * theta) for j in range(N))


def polylog_circle(k: float, theta):
    """Li_k(e^{i theta}) for real k > 1 and real theta (scalar or array).

    Direct summation is used when the integral tail bound reaches 1e-13
    within 10^6 terms; otherwise the convergent expansion in powers of
    i*theta around theta = 0, whose radius 2*pi covers |theta| <= pi.
    """
    k = float(k)
    if not k > 1:
        raise DomainError("polylog_circle needs k > 1; use the coefficient route for k <= 1")
    scalar = np.ndim(theta) == 0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if not np.all(np.isfinite(th)):
        raise DomainError("theta must be finite")
    # reduce to [-pi, pi]
    th = th - 2 * np.pi * np.round(th / (2 * np.pi))
    log_n = math.log((k - 1) * _POLYLOG_TOL) / (1 - k)
    if log_n <= math.log(_DIRECT_BUDGET):
        out = _polylog_direct(k, th, math.ceil(math.exp(log_n)))
    else:
        out = _polylog_expansion(k, th)
    return complex(out[0]) if scalar else out


def phi_polylog(k: float, x):
    """Generator ``(i/sqrt 2)(Li_k(e^{-i pi x}) - Li_k(e^{i pi x}))``.

    Equals ``sqrt 2 * sum sin(n pi x) / n^k``; real for real x.  Accepts any
    real x (the odd 2-periodic extension).
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    r = xs - 2.0 * np.round(xs / 2.0)
    theta = np.pi * r
    plus = np.atleast_1d(polylog_circle(k, theta))
    minus = np.atleast_1d(polylog_circle(k, -theta))
    comb = (1j / math.sqrt(2.0)) * (minus - plus)
    resid = float(np.max(np.abs(comb.imag))) if comb.size else 0.0
    if resid > 1e-13:
        raise ArithmeticError(f"phi_polylog imaginary residue {resid:.3e} exceeds 1e-13")
    out = comb.real
    return float(out[0]) if scalar else out


# ------------------------------------------------------ Dirichlet series


def _terms_needed(a: CoeffVector, sigma: np.ndarray, target: float) -> np.ndarray:
    """Smallest truncation per point whose decay tail is below target (capped at N)."""
    d = a.decay
    p = d.k + sigma
    if math.isinf(d.k) or d.C == 0:
        return np.full(sigma.shape, a.N)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.ceil((target * (p - 1) / d.C) ** (1.0 / (1.0 - p)))
    n = np.where(p > 1, n, a.N)
    return np.clip(np.nan_to_num(n, nan=a.N, posinf=a.N), 1, a.N).astype(int)


def _tail(a: CoeffVector, sigma: np.ndarray, n_used: np.ndarray) -> np.ndarray:
    if a.finite:
        return np.where(n_used >= a.N, 0.0, np.inf)
    if a.decay is None:
        # nothing is known past the stored entries
        return np.full(sigma.shape, np.inf)
    return np.array([a.decay.tail_sum(int(N), float(sg)) for N, sg in zip(n_used, sigma)])


_LONG_SERIES = 4096


def _direct_series(values: np.ndarray, s: np.ndarray, n_used: np.ndarray) -> np.ndarray:
    """Short series: compensated sweep over n, vectorized across points.
    Long series: one exactly rounded sum per point."""
    out = np.empty(s.shape, dtype=complex)
    for N in np.unique(n_used):
        N = int(N)
        sel = np.flatnonzero(n_used == N)
        if N > _LONG_SERIES:
            logn = np.log(np.arange(1, N + 1, dtype=float))
            a = values[:N]
            for i in sel:
                out[i] = csum(a * np.exp(-s[i] * logn))
            continue
        ss = s[sel]
        out[sel] = two_sum_accumulate(values[j] * np.exp(-ss * math.log(j + 1)) for j in range(N))
    return out


def dirichlet_series_grid(a: CoeffVector, s, target_abs_err: float = 1e-10, best_effort: bool = False):
    """Truncated ``sum a[n] n^{-s}`` on many points: ``(values, tails, terms)``."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if a.decay is None and not a.finite and not best_effort:
        raise InsufficientDecayError("coefficient vector has no decay metadata")
    if a.finite:
        n_used = np.full(s.shape, a.N)
    elif a.decay is not None:
        n_used = _terms_needed(a, s.real, target_abs_err)
    else:
        n_used = np.full(s.shape, a.N)
    values = np.asarray(a.values)

    def work(idx):
        idx = idx.astype(int)
        return (_direct_series(values, s[idx], n_used[idx]),)

    (vals,) = map_chunks(work, np.arange(s.size))
    tails = _tail(a, s.real, n_used)
    return vals, tails, n_used


def dirichlet_series(a: CoeffVector, s: complex, target_abs_err: float = 1e-10, best_effort: bool = False) -> SeriesValue:
    """``sum_{n<=N} a[n] n^{-s}`` with the integral-test tail bound.

    The truncation is the smallest N whose bound ``C N^{1-k-sigma} /
    (k+sigma-1)`` is below ``target_abs_err``, capped at the stored length;
    the returned ``tail_bound`` is the bound actually achieved.  Without
    decay metadata ``best_effort=True`` sums everything stored and reports
    an infinite tail.
    """
    v, t, n = dirichlet_series_grid(a, [s], target_abs_err, best_effort)
    return SeriesValue(complex(v[0]), float(t[0]), int(n[0]))


def l_function_grid(a: CoeffVector, s, target_abs_err: float = 1e-10, best_effort: bool = False):
    """L_a(s) on a grid: ``(values, error_bounds, masked)``.

    Power families ``a[n] = a[1] n^{-k}`` are continued analytically as
    ``a[1] zeta(s + k)``, which stays valid where the series itself
    diverges; the pole at s = 1 - k is masked.  Other sequences go through
    the truncated series.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if a.power is not None:
        shifted = s + a.power
        scale = a.values[0]

        def work(pts):
            v, b, _, m = zeta_grid(pts, target_abs_err)
            return v, b, m

        v, b, m = map_chunks(work, shifted)
        return scale * v, abs(scale) * b, m
    v, t, _ = dirichlet_series_grid(a, s, target_abs_err, best_effort)
    return v, t, np.zeros(s.shape, dtype=bool)
