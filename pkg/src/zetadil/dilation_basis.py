"""Dilated systems phi_n(x) = phi(nx), their biorthogonal duals, Gram
matrices and Riesz corridors.

Everything lives in coefficient space over e_k(x) = sqrt 2 sin(k pi x).
Dilation by n maps e_k to e_{nk}, so phi_n has coefficient a[k/n] on e_k
whenever n | k.  The matrix U with U[k, n] = a[k/n] [n | k] is lower
triangular in the divisibility order; its inverse is built the same way
from the Dirichlet inverse b of a, and the dual vectors are the columns of
(U^{-1})^H, each supported on the divisors of n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.fft
from scipy.integrate import solve_ivp

from ._summation import CompensatedArray, csum
from .dirichlet_arith import CoeffVector, Decay, _convolve, dirichlet_inverse, fmt
from .errors import DomainError, InsufficientDecayError, LengthError, NumericalFailure
from .special_fn import l_function_grid

EIG_RTOL = 1e-10


@dataclass(frozen=True)
class SineVector:
    """Coefficients of a function against e_k, k = 1..K."""

    coeffs: CoeffVector
    method: Optional[str] = None

    @property
    def K(self) -> int:
        return self.coeffs.N

    @property
    def values(self) -> np.ndarray:
        return self.coeffs.values

    def norm(self) -> float:
        """L2 norm of the represented function (Parseval)."""
        v = self.coeffs.values
        return math.sqrt(math.fsum(v.real**2) + math.fsum(v.imag**2))

    @classmethod
    def from_array(cls, values, method=None) -> "SineVector":
        return cls(CoeffVector(values), method)


class DilatedSystem:
    """The system {phi(nx)} generated by coefficients a (normalized a[1] = 1).

    ``normalization`` is the original a[1]; dividing by it does not change
    the span of the system.
    """

    def __init__(self, a: CoeffVector, family: str = "coeffs", decay_k: float = 1.0):
        a1 = a.values[0]
        if a1 == 0:
            raise DomainError("generator needs a[1] != 0")
        normed = a if a1 == 1 else a.scaled(1.0 / a1)
        if normed.decay is None:
            # finite generator: any exponent works with a large enough constant
            n = np.arange(1, normed.N + 1, dtype=float)
            C = float(np.max(np.abs(normed.values) * n**decay_k)) * (1 + 1e-12)
            normed = CoeffVector(normed.values, decay=Decay(C, decay_k), power=normed.power, finite=normed.finite)
        self.a = normed
        self.normalization = complex(a1)
        self.family = family
        self._dual: Optional[CoeffVector] = None

    def __repr__(self):
        return f"DilatedSystem(family={self.family!r}, N={self.N})"

    @property
    def N(self) -> int:
        return self.a.N

    @property
    def decay(self) -> Decay:
        return self.a.decay

    @property
    def is_finite(self) -> bool:
        """True when the generator is zero past N (not a power family)."""
        return self.a.power is None

    @classmethod
    def polylog(cls, k: float, N: int) -> "DilatedSystem":
        """Generator a[n] = n^{-k}, i.e. phi = (i/sqrt 2)(Li_k(e^{-i pi x}) - Li_k(e^{i pi x}))."""
        return cls(CoeffVector.power_law(k, N), family=f"polylog k={k:g}")

    @classmethod
    def delta(cls, N: int) -> "DilatedSystem":
        return cls(CoeffVector.delta(N), family="delta")

    def coeff_array(self, length: int) -> np.ndarray:
        return np.asarray(self.a.extended(length))

    def dual(self, length: Optional[int] = None) -> CoeffVector:
        """Dirichlet inverse b of a, computed once up to the longest length asked."""
        length = self.N if length is None else length
        if length > self.N:
            raise LengthError(f"dual length {length} exceeds N={self.N}")
        if self._dual is None or self._dual.N < length:
            self._dual = dirichlet_inverse(self.a, length)
        return self._dual if self._dual.N == length else self._dual.truncated(length)


@dataclass(frozen=True)
class DualSystem:
    b: CoeffVector
    parent: DilatedSystem

    @classmethod
    def of(cls, sys: DilatedSystem, length: Optional[int] = None) -> "DualSystem":
        return cls(sys.dual(length), sys)


def _check_index(sys: DilatedSystem, n: int) -> None:
    if not 1 <= n <= sys.N:
        raise IndexError(f"index {n} outside 1..{sys.N}")


def phi_coefficients(sys: DilatedSystem, n: int, K: Optional[int] = None) -> SineVector:
    """Column n of the dilation matrix: a[k/n] on e_k for n | k <= K."""
    K = sys.N if K is None else K
    _check_index(sys, n)
    if K > sys.N:
        raise LengthError(f"K={K} exceeds N={sys.N}")
    out = np.zeros(K, dtype=complex)
    m = K // n
    out[n - 1 :: n] = sys.coeff_array(m)
    return SineVector.from_array(out)


def dual_coefficients(sys: DilatedSystem, n: int) -> SineVector:
    """Dual vector for index n: conj(b[n/d]) on e_d for every d | n."""
    _check_index(sys, n)
    b = sys.dual(n).values
    out = np.zeros(n, dtype=complex)
    d = np.arange(1, n + 1)
    divs = d[n % d == 0]
    out[divs - 1] = np.conj(b[n // divs - 1])
    return SineVector.from_array(out)


def evaluate(v: SineVector, x):
    """``sum_k coeffs[k] sqrt 2 sin(k pi x)``, ascending k, exactly rounded per point."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    c = v.values
    k = np.arange(1, c.size + 1, dtype=float)
    out = np.empty(xs.shape, dtype=complex)
    for i, xi in enumerate(xs):
        if xi == 0.0:
            out[i] = 0.0
            continue
        out[i] = math.sqrt(2.0) * csum(c * np.sin(k * (math.pi * xi)))
    return complex(out[0]) if scalar else out


def evaluate_uniform(v: SineVector, L: int) -> np.ndarray:
    """Values at the interior grid x_j = j/L, j = 1..L-1.

    sin(k pi j / L) depends only on k mod 2L (with a sign flip past L), so
    the coefficients are first folded into L-1 bins with per-bin compensated
    accumulation in ascending k, then one DST-I of length L-1 evaluates the
    folded series.  Exact rearrangement of the truncated sum; cost
    O(K + L log L).
    """
    if L < 2:
        raise DomainError("need L >= 2")
    c = v.values
    period = 2 * L
    acc = CompensatedArray(L - 1)
    for start in range(0, c.size, period):
        block = c[start : start + period]  # indices k = start+1 .. start+period
        # k mod 2L = 1..L-1 contribute +, L+1..2L-1 contribute - to bin 2L-r
        up = block[: L - 1]
        acc.add(slice(0, up.size), up)
        down = block[L : period - 1]
        if down.size:
            # r = L+1 .. L+size lands in bins (0-based) L-2 down to L-1-size
            acc.add(slice(L - 1 - down.size, L - 1), -down[::-1])
    folded = acc.result()
    y = scipy.fft.dst(folded.real, type=1) + 1j * scipy.fft.dst(folded.imag, type=1)
    return (math.sqrt(2.0) / 2.0) * y


def biorthogonality_check(sys: DilatedSystem, M: int) -> float:
    """max_{m,n<=M} |<dual_m, phi_n> - delta_mn| with the pairing done in coefficient space."""
    if M > sys.N:
        raise LengthError(f"M={M} exceeds N={sys.N}")
    worst = 0.0
    phis = [phi_coefficients(sys, n, M).values for n in range(1, M + 1)]
    for m in range(1, M + 1):
        dm = dual_coefficients(sys, m).values
        for n in range(1, M + 1):
            pair = csum(np.conj(dm) * phis[n - 1][:m])
            worst = max(worst, abs(pair - (1.0 if m == n else 0.0)))
    return worst


@dataclass
class GramSummary:
    M: int
    K: int
    entries: np.ndarray
    lambda_min: float
    lambda_max: float
    cond: float
    tail_bound: float
    eigenvalues: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> str:
        return dumps_json(
            {
                "M": self.M,
                "K": self.K,
                "lambda_min": self.lambda_min,
                "lambda_max": self.lambda_max,
                "cond": self.cond,
                "tail_bound": self.tail_bound,
            }
        )

    def entries_csv(self) -> str:
        lines = ["m,n,re,im"]
        for m in range(self.M):
            for n in range(self.M):
                z = self.entries[m, n]
                lines.append(f"{m + 1},{n + 1},{fmt(z.real)},{fmt(z.imag)}")
        return "\n".join(lines) + "\n"


def dumps_json(obj) -> str:
    """JSON with every float written to 17 significant digits; non-finite -> null."""

    def enc(o):
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt(o) if math.isfinite(o) else "null"
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")

    return enc(obj) + "\n"


def _gram_entry_tail(sys: DilatedSystem, m: int, n: int, K: int) -> float:
    L = m * n // math.gcd(m, n)
    if sys.is_finite and K >= sys.N * min(m, n):
        return 0.0
    d = sys.decay
    if math.isinf(d.k):
        return 0.0
    J = K // L
    p = 2 * d.k
    if p <= 1 or J < 1:
        return math.inf
    return d.C**2 * (m * n / L**2) ** d.k * J ** (1 - p) / (p - 1)


def gram_matrix(sys: DilatedSystem, M: int, K: Optional[int] = None) -> GramSummary:
    """Truncated Gram matrix G[m][n] = <phi_m, phi_n> for m, n <= M.

    ``G[m][n] = sum_{k<=K, lcm(m,n)|k} conj(a[k/m]) a[k/n]``, each entry
    summed exactly rounded.  The lower triangle is the conjugate of the
    upper one.  ``tail_bound`` is the Frobenius norm of the entrywise
    truncation bounds, hence a bound on how far any eigenvalue can move.
    """
    K = 2**16 * M if K is None else K
    if not (1 <= M <= K):
        raise DomainError(f"need 1 <= M <= K, got M={M}, K={K}")
    if K > sys.N * M:
        raise LengthError(f"K={K} exceeds N*M={sys.N * M}")
    if sys.decay is None:
        raise InsufficientDecayError("Gram tail needs decay metadata")
    a = sys.coeff_array(K)
    G = np.zeros((M, M), dtype=complex)
    tails = np.zeros((M, M))
    for m in range(1, M + 1):
        for n in range(m, M + 1):
            L = m * n // math.gcd(m, n)
            j = np.arange(1, K // L + 1)
            prod = np.conj(a[(L // m) * j - 1]) * a[(L // n) * j - 1]
            g = csum(prod)
            if m == n:
                g = complex(g.real, 0.0)
            G[m - 1, n - 1] = g
            G[n - 1, m - 1] = g.conjugate()
            tails[m - 1, n - 1] = tails[n - 1, m - 1] = _gram_entry_tail(sys, m, n, K)
    w, V = np.linalg.eigh(G)
    lam_min, lam_max = float(w[0]), float(w[-1])
    for idx in (0, -1):
        r = np.linalg.norm(G @ V[:, idx] - w[idx] * V[:, idx])
        if r > EIG_RTOL * max(abs(lam_max), 1e-300):
            raise NumericalFailure(f"eigenpair residual {r:.3e} above tolerance")
    cond = lam_max / lam_min if lam_min > 0 else math.inf
    tail = math.sqrt(math.fsum((tails**2).ravel())) if np.all(np.isfinite(tails)) else math.inf
    return GramSummary(M, K, G, lam_min, lam_max, cond, tail, w)


@dataclass(frozen=True)
class Corridor:
    lo: float
    hi: float
    t_lo: float
    t_hi: float
    error_bound: float

    def __iter__(self):
        return iter((self.lo, self.hi))


def riesz_corridor(sys: DilatedSystem, t_max: float, step: float, target_abs_err: float = 1e-12) -> Corridor:
    """Grid extremes of |L_a(1/2 + it)|^2 for |t| <= t_max.

    For a real generator only t >= 0 is evaluated and mirrored, which makes
    the scan exactly symmetric.
    """
    if not step > 0:
        raise DomainError("step must be positive")
    J = int(math.floor(t_max / step + 1e-9))
    real = not np.any(sys.a.values.imag)
    j = np.arange(0 if real else -J, J + 1)
    t = j * step
    vals, errs, masked = l_function_grid(sys.a, 0.5 + 1j * t, target_abs_err)
    if real:
        t = np.concatenate([-t[:0:-1], t])
        vals = np.concatenate([np.conj(vals[:0:-1]), vals])
        errs = np.concatenate([errs[:0:-1], errs])
        masked = np.concatenate([masked[:0:-1], masked])
    mod2 = np.abs(vals) ** 2
    ok = ~masked & np.isfinite(mod2)
    if not ok.any():
        raise NumericalFailure("no finite corridor values")
    idx = np.flatnonzero(ok)
    i_lo = idx[np.argmin(mod2[ok])]
    i_hi = idx[np.argmax(mod2[ok])]
    absv = np.abs(vals[ok])
    e = errs[ok]
    err = float(np.max(2 * absv * e + e * e))
    return Corridor(float(mod2[i_lo]), float(mod2[i_hi]), float(t[i_lo]), float(t[i_hi]), err)


def _adjoint_apply(a: np.ndarray, v: np.ndarray, K: int) -> np.ndarray:
    """(U_K^H v)_j = sum_{q: jq<=K} conj(a[q]) v[jq]."""
    out = CompensatedArray(K)
    nz = np.flatnonzero(v)
    top = int(nz[-1]) + 1 if nz.size else 0
    for q in range(1, top + 1):
        seg = v[q - 1 : K : q]
        if not np.any(seg):
            continue
        out.add(slice(0, seg.size), np.conj(a[q - 1]) * seg)
    return out.result()


@dataclass(frozen=True)
class BariResidual:
    residual: float
    tail_bound: float


def bari_g_residual(sys: DilatedSystem, M: int, K: int) -> BariResidual:
    """max_{n<=M} ||phi_n - U U^H dual_n|| / ||phi_n|| with U truncated to K x K.

    ``tail_bound`` bounds the relative norm of the part of phi_n cut off at K.
    """
    if M > sys.N or K > sys.N or M > K:
        raise LengthError("need M <= K <= N")
    a = sys.coeff_array(K)
    worst = 0.0
    worst_tail = 0.0
    for n in range(1, M + 1):
        dn = np.zeros(K, dtype=complex)
        dn[:n] = dual_coefficients(sys, n).values
        y = _adjoint_apply(a, dn, K)
        z = _convolve(y, a, K)
        phi = phi_coefficients(sys, n, K).values
        nrm = np.linalg.norm(phi)
        worst = max(worst, float(np.linalg.norm(z - phi) / nrm))
        d = sys.decay
        J = K // n
        if sys.is_finite and J >= sys.N or math.isinf(d.k):
            t = 0.0
        elif 2 * d.k > 1:
            t = d.C * math.sqrt(J ** (1 - 2 * d.k) / (2 * d.k - 1)) / nrm
        else:
            t = math.inf
        worst_tail = max(worst_tail, t)
    return BariResidual(worst, worst_tail)


@dataclass(frozen=True)
class GeneratorCheck:
    identity_error: float
    generator_error: float


def dilation_generator_check(f: Callable, x: float, lam: float, h: float = 1e-7) -> GeneratorCheck:
    """Two checks that x d/dx generates f(x) -> f(e^lam x).

    identity: integrate the flow dX/dlam = X from X(0) = x numerically and
    compare f(X(lam)) with f(e^lam x).
    generator: forward quotient (f(e^h x) - f(x))/h against x f'(x), with
    f' from a central difference of width h.
    """
    if not 0 < x < 1:
        raise DomainError("x must lie in (0, 1)")
    for y in (math.exp(lam) * x, math.exp(h) * x, x - h, x + h):
        if not 0 < y < 1:
            raise DomainError(f"evaluation point {y} outside (0, 1)")
    target = f(math.exp(lam) * x)
    if lam == 0:
        ident = 0.0
    else:
        sol = solve_ivp(lambda _, X: X, (0.0, lam), [x], method="DOP853", rtol=1e-13, atol=1e-15)
        flowed = f(float(sol.y[0, -1]))
        ident = abs(flowed - target) / max(abs(target), 1e-300)
    deriv = (f(x + h) - f(x - h)) / (2 * h)
    exact = x * deriv
    fd = (f(math.exp(h) * x) - f(x)) / h
    gen = abs(fd - exact) / abs(exact) if exact != 0 else math.inf
    return GeneratorCheck(float(ident), float(gen))


def dilation_sine_identity(n: int, K: int = 31) -> float:
    """Max deviation of the sine coefficients of e_1(e^{ln n} x) from e_n.

    Coefficients are taken by DST-I on an oversampled grid; K >= n.
    """
    from .expansion import QuadConfig, sine_coefficients

    scale = math.exp(math.log(n))
    v = sine_coefficients(lambda x: math.sqrt(2.0) * np.sin(math.pi * scale * x), K, QuadConfig(method="dst"))
    target = np.zeros(K)
    target[n - 1] = 1.0
    return float(np.max(np.abs(v.values - target)))
