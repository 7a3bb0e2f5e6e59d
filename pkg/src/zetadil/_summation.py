"""Compensated accumulation helpers.

Scalar sums go through :func:`math.fsum` (exactly rounded).  Array
accumulators use Knuth's branch-free TwoSum so that every entry carries its
own error term; the result of each entry depends only on the order in which
its own terms were added, never on how work is split between threads.
"""

import math

import numpy as np


def csum(values) -> complex:
    """Exactly rounded sum of a sequence of complex numbers."""
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size == 0:
        return 0j
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def fsum(values) -> float:
    arr = np.asarray(values, dtype=float).ravel()
    return math.fsum(arr)


class CompensatedArray:
    """Array of running sums with per-entry TwoSum compensation.

    Real and imaginary parts of complex data are compensated independently.
    ``index`` must be a basic slice so the selected entries are views.
    """

    def __init__(self, size: int, dtype=complex):
        self.dtype = np.dtype(dtype)
        self._s = np.zeros(size, dtype=self.dtype)
        self._c = np.zeros(size, dtype=self.dtype)

    @staticmethod
    def _two_sum(s, c, x) -> None:
        t = s + x
        z = t - s
        c += (s - (t - z)) + (x - z)
        s[...] = t

    def add(self, index, values) -> None:
        """Add ``values`` into the entries selected by ``index`` (a slice)."""
        s = self._s[index]
        c = self._c[index]
        x = np.broadcast_to(np.asarray(values, dtype=self.dtype), s.shape)
        if self.dtype.kind == "c":
            self._two_sum(s.real, c.real, x.real)
            self._two_sum(s.imag, c.imag, x.imag)
        else:
            self._two_sum(s, c, x)

    def value(self, i: int):
        return self._s[i] + self._c[i]

    def result(self) -> np.ndarray:
        return self._s + self._c


def two_sum_accumulate(terms) -> np.ndarray:
    """Sum an iterable of equally shaped arrays with per-entry compensation.

    Terms are consumed in iteration order, which fixes the rounding pattern.
    """
    acc = None
    for term in terms:
        term = np.asarray(term)
        if acc is None:
            dtype = complex if np.iscomplexobj(term) else float
            acc = CompensatedArray(term.size, dtype=dtype)
            shape = term.shape
        acc.add(slice(None), term.ravel())
    if acc is None:
        raise ValueError("no terms to accumulate")
    return acc.result().reshape(shape)
