"""Arithmetic of coefficient sequences indexed by the positive integers.

Sequences are stored 0-based in numpy arrays but always addressed 1-based
through :class:`CoeffVector`.  Dirichlet convolution and inversion are
evaluated with the "for each d, for each multiple of d" loop order, in
ascending ``d``, with compensated accumulation per entry, so results are
bit-reproducible.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ._summation import CompensatedArray
from .errors import DomainError, LengthError, NonInvertibleError

# Relative slack allowed when validating a decay bound against stored values.
_DECAY_RTOL = 1e-12


@dataclass(frozen=True)
class Decay:
    """Assertion ``|a[n]| <= C * n**(-k)`` for every n (stored or not)."""

    C: float
    k: float

    def __post_init__(self):
        if not (self.C >= 0 and math.isfinite(self.C)):
            raise DomainError(f"decay constant must be finite and >= 0, got {self.C}")
        if math.isnan(self.k):
            raise DomainError("decay exponent is NaN")

    def bound(self, n):
        return self.C * np.asarray(n, dtype=float) ** (-self.k)

    def tail_sum(self, N: int, shift: float = 0.0) -> float:
        """Bound on ``sum_{n>N} C n^{-(k+shift)}`` by the integral test."""
        p = self.k + shift
        if math.isinf(p) or self.C == 0:
            return 0.0
        if p <= 1:
            return math.inf
        return self.C * N ** (1.0 - p) / (p - 1.0)


class CoeffVector:
    """Finite complex sequence ``values[1..N]``.

    ``power`` marks a pure power family: the sequence is exactly
    ``values[1] * n**(-power)`` for *every* n, including indices past N.
    Routines use this to extend the sequence or to continue its Dirichlet
    series analytically.  ``finite`` asserts the sequence is exactly zero
    past N, so series over it have no tail.  Otherwise the stored values are
    a truncation: they are extended by zeros where a longer array is needed,
    and tail bounds come from the ``decay`` record of the underlying
    infinite sequence.
    """

    __slots__ = ("_values", "decay", "power", "finite")

    def __init__(self, values, decay: Optional[Decay] = None, power: Optional[float] = None, finite: bool = False):
        arr = np.array(values, dtype=complex).ravel()
        if arr.size < 1:
            raise LengthError("a CoeffVector needs at least one entry")
        if decay is not None:
            n = np.arange(1, arr.size + 1)
            bound = decay.bound(n)
            if np.any(np.abs(arr) > bound * (1 + _DECAY_RTOL) + 1e-300):
                bad = int(np.argmax(np.abs(arr) > bound * (1 + _DECAY_RTOL))) + 1
                raise DomainError(f"entry {bad} violates the decay bound C={decay.C}, k={decay.k}")
        arr.setflags(write=False)
        self._values = arr
        self.decay = decay
        self.power = power
        if finite and power is not None:
            raise DomainError("a power family is not finitely supported")
        self.finite = bool(finite)

    @property
    def values(self) -> np.ndarray:
        """0-based read-only view: ``values[n-1]`` is the n-th coefficient."""
        return self._values

    @property
    def N(self) -> int:
        return self._values.size

    def __len__(self):
        return self._values.size

    def __getitem__(self, n: int) -> complex:
        if not 1 <= n <= self.N:
            raise IndexError(f"index {n} outside 1..{self.N}")
        return complex(self._values[n - 1])

    def __repr__(self):
        extra = ""
        if self.decay is not None:
            extra += f", decay=({self.decay.C:g}, {self.decay.k:g})"
        if self.power is not None:
            extra += f", power={self.power:g}"
        if self.finite:
            extra += ", finite"
        return f"CoeffVector(N={self.N}{extra})"

    def extended(self, length: int) -> np.ndarray:
        """Coefficient array of the given length (extended past N if known)."""
        if length <= self.N:
            return self._values[:length]
        if self.power is not None:
            n = np.arange(1, length + 1, dtype=float)
            return self._values[0] * n ** (-self.power)
        out = np.zeros(length, dtype=complex)
        out[: self.N] = self._values
        return out

    def truncated(self, N: int) -> "CoeffVector":
        if N > self.N and self.power is None and not self.finite:
            raise LengthError(f"cannot extend a length-{self.N} sequence to {N}")
        finite = self.finite and N >= self.N
        return CoeffVector(self.extended(N), decay=self.decay, power=self.power, finite=finite)

    def scaled(self, factor: complex) -> "CoeffVector":
        decay = None
        if self.decay is not None:
            decay = Decay(self.decay.C * abs(factor), self.decay.k)
        return CoeffVector(self._values * factor, decay=decay, power=self.power, finite=self.finite)

    # constructors

    @classmethod
    def delta(cls, N: int) -> "CoeffVector":
        """Dirichlet unit (1, 0, 0, ...)."""
        v = np.zeros(N, dtype=complex)
        v[0] = 1
        return cls(v, decay=Decay(1.0, math.inf), finite=True)

    @classmethod
    def power_law(cls, k: float, N: int, scale: complex = 1.0) -> "CoeffVector":
        """``scale * n**(-k)`` for n = 1..N."""
        n = np.arange(1, N + 1, dtype=float)
        return cls(scale * n ** (-k), decay=Decay(abs(scale), k), power=k)

    # serialization

    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        text = coeffs_to_csv(self._values)
        if path is not None:
            Path(path).write_text(text, encoding="utf-8", newline="")
        return text

    @classmethod
    def from_csv(cls, source, decay: Optional[Decay] = None, finite: bool = False) -> "CoeffVector":
        """Read ``n,re,im`` rows; ``source`` is a path or the CSV text itself."""
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["n", "re", "im"]:
            raise ValueError("coefficient CSV must start with the header n,re,im")
        data = {}
        for row in rows[1:]:
            if not row:
                continue
            n = int(row[0])
            if n < 1 or n in data:
                raise ValueError(f"bad or duplicate index {n}")
            data[n] = complex(float(row[1]), float(row[2]))
        if not data:
            raise LengthError("coefficient CSV has no rows")
        N = max(data)
        values = np.zeros(N, dtype=complex)
        for n, v in data.items():
            values[n - 1] = v
        return cls(values, decay=decay, finite=finite)


def fmt(x: float) -> str:
    """17 significant digits, no locale, no negative zero."""
    x = float(x) + 0.0
    if x == 0:
        return "0"
    return format(x, ".17g")


def coeffs_to_csv(values, header=("n", "re", "im")) -> str:
    lines = [",".join(header)]
    for n, v in enumerate(np.asarray(values, dtype=complex), start=1):
        lines.append(f"{n},{fmt(v.real)},{fmt(v.imag)}")
    return "\n".join(lines) + "\n"


# integer kernels


def _check_positive(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"expected a positive integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"expected a positive integer, got {n}")
    return n


def mobius(n: int) -> int:
    """Möbius function by trial-division factorization."""
    n = _check_positive(n)
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1 if p == 2 else 2
    if n > 1:
        result = -result
    return result


def mobius_sieve(N: int) -> np.ndarray:
    """Array ``mu`` with ``mu[n-1] = mobius(n)`` for n = 1..N (linear sieve)."""
    N = _check_positive(N)
    mu = np.zeros(N + 1, dtype=np.int8)
    mu[1] = 1
    is_comp = bytearray(N + 1)
    primes = []
    for i in range(2, N + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > N:
                break
            is_comp[ip] = 1
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu[1:].astype(np.int64)


def divisors(n: int) -> list:
    """Sorted divisors of n by trial division up to sqrt(n)."""
    n = _check_positive(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


# Dirichlet algebra


def _as_array(a, N: int, name: str) -> np.ndarray:
    if isinstance(a, CoeffVector):
        if a.N < N:
            raise LengthError(f"{name} has length {a.N} < N={N}")
        return np.asarray(a.values[:N], dtype=complex)
    arr = np.asarray(a, dtype=complex).ravel()
    if arr.size < N:
        raise LengthError(f"{name} has length {arr.size} < N={N}")
    return arr[:N]


def _convolve(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    acc = CompensatedArray(N)
    for d in range(1, N + 1):
        ad = a[d - 1]
        if ad == 0:
            continue
        m = N // d
        # entries d*1, d*2, ..., d*m receive a[d] * b[1..m]
        acc.add(slice(d - 1, d * m, d), ad * b[:m])
    return acc.result()


def dirichlet_convolve(a, b, N: Optional[int] = None) -> CoeffVector:
    """``(a * b)[n] = sum_{d | n} a[d] b[n/d]`` for n <= N."""
    if N is None:
        N = min(len(a), len(b))
    if N < 1:
        raise LengthError("N must be >= 1")
    av = _as_array(a, N, "a")
    bv = _as_array(b, N, "b")
    return CoeffVector(_convolve(av, bv, N))


def dirichlet_inverse(a, N: Optional[int] = None) -> CoeffVector:
    """Dirichlet inverse by the divisor recursion.

    ``b[1] = 1/a[1]`` and ``b[n] = -(1/a[1]) sum_{d|n, d<n} b[d] a[n/d]``.
    The partial sums are pushed forward: once ``b[d]`` is final it is added
    into every multiple of d, ascending in d, with compensation.
    """
    if N is None:
        N = len(a)
    av = _as_array(a, N, "a")
    a1 = av[0]
    if a1 == 0:
        raise NonInvertibleError("a[1] = 0: sequence has no Dirichlet inverse")
    b = np.zeros(N, dtype=complex)
    acc = CompensatedArray(N)
    inv_a1 = 1.0 / a1
    for d in range(1, N + 1):
        bd = inv_a1 if d == 1 else -inv_a1 * acc.value(d - 1)
        b[d - 1] = bd
        m = N // d
        if m >= 2 and bd != 0:
            acc.add(slice(2 * d - 1, d * m, d), bd * av[1:m])
    decay = None
    if isinstance(a, CoeffVector) and a.power is not None and a.decay is not None:
        # mu(n) a[n] / a[1]^2 is bounded by the same power law
        decay = Decay(a.decay.C / abs(a1) ** 2, a.decay.k)
    return CoeffVector(b, decay=decay)


@dataclass(frozen=True)
class MultiplicativityReport:
    verdict: bool
    violation: Optional[Tuple[int, int]] = None
    deviation: float = 0.0


def is_completely_multiplicative(a, N: Optional[int] = None, tol: float = 1e-13) -> MultiplicativityReport:
    """Check ``|a[mn] - a[m] a[n]| <= tol`` for all m <= n with mn <= N.

    Pairs are scanned in order of m, then n; the first failing pair is
    reported.
    """
    if N is None:
        N = len(a)
    av = _as_array(a, N, "a")
    if av[0] == 0:
        raise NonInvertibleError("a[1] = 0")
    for m in range(1, math.isqrt(N) + 1):
        n = np.arange(m, N // m + 1)
        if n.size == 0:
            continue
        dev = np.abs(av[m * n - 1] - av[m - 1] * av[n - 1])
        bad = np.nonzero(dev > tol)[0]
        if bad.size:
            i = int(bad[0])
            return MultiplicativityReport(False, (m, int(n[i])), float(dev[i]))
    return MultiplicativityReport(True)
