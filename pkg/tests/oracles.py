"""Reference implementations that share no code with the package.

Slow but straightforward: brute-force divisor sums, a dense dilation
matrix, and a plain Euler-Maclaurin zeta written against the textbook
formula.
"""

import math
from fractions import Fraction

import numpy as np


def divisor_convolve(a, b):
    N = min(len(a), len(b))
    out = [0j] * N
    for n in range(1, N + 1):
        out[n - 1] = sum(a[d - 1] * b[n // d - 1] for d in range(1, n + 1) if n % d == 0)
    return np.array(out)


def divisor_inverse(a):
    N = len(a)
    b = [0j] * N
    b[0] = 1 / a[0]
    for n in range(2, N + 1):
        s = sum(b[d - 1] * a[n // d - 1] for d in range(1, n) if n % d == 0)
        b[n - 1] = -s / a[0]
    return np.array(b)


def mobius_naive(n):
    """mu(n) from the prime factorization, counted the obvious way."""
    k, m, p = 0, n, 2
    while m > 1:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            k += 1
        else:
            p += 1
    return (-1) ** k


def dilation_matrix(a, N):
    """Dense U[k, n] = a[k/n] if n | k (0-based storage)."""
    U = np.zeros((N, N), dtype=complex)
    for n in range(1, N + 1):
        for k in range(n, N + 1, n):
            U[k - 1, n - 1] = a[k // n - 1]
    return U


def _bernoulli(m):
    B = [Fraction(1)]
    for j in range(1, m + 1):
        B.append(-sum(math.comb(j + 1, i) * B[i] for i in range(j)) / Fraction(j + 1))
    return B


_B = _bernoulli(40)


def zeta_em(s, N=40, P=16):
    """zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2 + sum_j B_2j/(2j)! (s)_{2j-1} N^{-s-2j+1}."""
    s = complex(s)
    total = sum(n ** (-s) for n in range(1, N))
    total += N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    rising = s
    for j in range(1, P + 1):
        total += float(_B[2 * j]) / math.factorial(2 * j) * rising * N ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return total


def sine_series(k, x, terms=200000):
    """sqrt 2 sum sin(n pi x) n^-k, summed directly (slowly convergent)."""
    n = np.arange(1, terms + 1)
    return math.sqrt(2) * np.sum(np.sin(np.pi * np.outer(np.atleast_1d(x), n)) * n ** (-float(k)), axis=1)
