"""Expansion of functions in a dilated system and the half-plane scan.

Analysis uses the dual: c[n] = sum_{d|n} b[n/d] psi[d], a Dirichlet
convolution with the inverse coefficients.  Synthesis convolves with a.
Both are exact at any truncation because divisors of n never exceed n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.fft

from ._summation import fsum
from .dilation_basis import DilatedSystem, SineVector, dumps_json
from .dirichlet_arith import CoeffVector, _convolve, coeffs_to_csv
from .errors import DomainError, LengthError, ResolutionError
from .special_fn import l_function_grid

# ------------------------------------------------------ sine coefficients


@dataclass(frozen=True)
class QuadConfig:
    """How to take sine coefficients.

    ``method``: "auto" picks the DST when psi vanishes at both ends (the
    trapezoid rule on the odd extension then converges fast) and Gauss
    panels otherwise.  The DST grid has 2^m - 1 interior points with
    2^m >= max(oversample (N+1), min_points).  Gauss panels carry ``order``
    nodes each and at least ``points_per_oscillation`` nodes per period of
    mode N (times ``oversample`` / 2).
    """

    method: str = "auto"
    oversample: int = 8
    min_points: int = 2**13
    order: int = 16
    points_per_oscillation: int = 8
    max_points: int = 2**24


def _call_vectorized(psi: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(psi(x))
        if y.shape == x.shape:
            return y
    except Exception:
        pass
    return np.array([psi(float(t)) for t in x])


def _vanishes_at_ends(psi: Callable) -> bool:
    """True when psi(0) = psi(1) = 0, so the odd extension has no jump."""
    try:
        ends = np.asarray(_call_vectorized(psi, np.array([0.0, 1.0])), dtype=complex)
    except (ArithmeticError, ValueError):
        return False
    return bool(np.all(np.isfinite(ends)) and np.all(np.abs(ends) <= 1e-14))


def sine_coefficients(psi: Callable, N: int, quad: Optional[QuadConfig] = None) -> SineVector:
    """psi_n ~ integral_0^1 psi(x) sqrt 2 sin(n pi x) dx for n = 1..N."""
    quad = quad or QuadConfig()
    if N < 1:
        raise DomainError("need at least one mode")
    method = quad.method
    if method == "auto":
        method = "dst" if _vanishes_at_ends(psi) else "gauss"
    if method == "dst":
        L = 1 << max(1, math.ceil(math.log2(max(quad.oversample * (N + 1), quad.min_points, N + 1))))
        if L - 1 > quad.max_points:
            raise ResolutionError(f"DST grid of {L - 1} points exceeds budget {quad.max_points}")
        x = np.arange(1, L) / L
        y = _call_vectorized(psi, x)
        if np.iscomplexobj(y):
            t = scipy.fft.dst(y.real, type=1) + 1j * scipy.fft.dst(y.imag, type=1)
        else:
            t = scipy.fft.dst(np.asarray(y, dtype=float), type=1)
        coeffs = t[:N] / (math.sqrt(2.0) * L)
        return SineVector.from_array(coeffs, method=f"dst-I:{L - 1}")
    if method == "gauss":
        per_osc = quad.points_per_oscillation * max(1, quad.oversample // 2)
        panels = max(1, math.ceil(per_osc * N / (2 * quad.order)))
        total = panels * quad.order
        if total > quad.max_points or quad.order * panels * 2 < quad.points_per_oscillation * N:
            raise ResolutionError(f"{total} quadrature nodes cannot resolve mode {N}")
        g, w = np.polynomial.legendre.leggauss(quad.order)
        edges = np.arange(panels) / panels
        h = 1.0 / panels
        x = (edges[:, None] + (g[None, :] + 1) * h / 2).ravel()
        wt = np.tile(w * h / 2, panels)
        y = _call_vectorized(psi, x) * wt
        coeffs = np.empty(N, dtype=complex)
        chunk = max(1, 2**22 // x.size)
        for lo in range(0, N, chunk):
            n = np.arange(lo + 1, min(N, lo + chunk) + 1, dtype=float)
            coeffs[lo : lo + n.size] = math.sqrt(2.0) * (np.sin(np.outer(n, np.pi * x)) @ y)
        return SineVector.from_array(coeffs, method=f"gauss:{quad.order}x{panels}")
    raise ValueError(f"unknown quadrature method {method!r}")


# ----------------------------------------------------- analysis/synthesis


@dataclass
class ExpansionResult:
    c: CoeffVector
    psi: SineVector
    residual_l2: float

    def to_csv(self) -> str:
        return coeffs_to_csv(self.c.values, header=("n", "c_re", "c_im"))

    def summary_json(self) -> str:
        return dumps_json(
            {
                "N": self.c.N,
                "psi_norm": self.psi.norm(),
                "c_norm": float(np.linalg.norm(self.c.values)),
                "residual_l2": self.residual_l2,
                "method": self.psi.method,
            }
        )


def _shared_length(sys: DilatedSystem, n: int) -> int:
    if n > sys.N:
        raise LengthError(f"truncation {n} exceeds system size {sys.N}")
    return n


def synthesize(sys: DilatedSystem, c) -> SineVector:
    """psi[k] = sum_{n|k} a[k/n] c[n]."""
    cv = np.asarray(c.values if isinstance(c, CoeffVector) else c, dtype=complex)
    N = _shared_length(sys, cv.size)
    return SineVector.from_array(_convolve(cv, sys.coeff_array(N), N))


def analyze(sys: DilatedSystem, psi: SineVector) -> ExpansionResult:
    """c[n] = <dual_n, psi> = sum_{d|n} b[n/d] psi[d]."""
    N = _shared_length(sys, psi.K)
    pv = np.asarray(psi.values)
    c = _convolve(pv, sys.dual(N).values, N)
    back = _convolve(c, sys.coeff_array(N), N)
    diff = pv - back
    resid = math.sqrt(fsum(diff.real**2) + fsum(diff.imag**2))
    return ExpansionResult(CoeffVector(c), psi, resid)


@dataclass(frozen=True)
class StabilityReport:
    """Random-probe extremes plus the exact ones over the same subspace.

    ``sup_ratio``/``inf_ratio`` are the extreme singular values of the
    analysis map restricted to modes <= M, i.e. the true max/min of
    ||c|| / ||psi|| that the random probes approach from inside.
    """

    min_ratio: float
    max_ratio: float
    inf_ratio: float
    sup_ratio: float
    trials: int
    M: int
    N: int
    seed: int


def stability_report(sys: DilatedSystem, trials: int, M: int, seed: int, N: Optional[int] = None) -> StabilityReport:
    """Extremes of ||c|| / ||psi|| over random unit psi on modes <= M.

    psi has independent standard normal real and imaginary parts; c is
    taken up to index N (default: the system size).
    """
    N = sys.N if N is None else N
    if not (1 <= M <= N <= sys.N):
        raise LengthError("need M <= N <= system size")
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((M, trials)) + 1j * rng.standard_normal((M, trials))
    psi /= np.linalg.norm(psi, axis=0)
    b = sys.dual(N).values
    # columns of U^{-1}: b spread over multiples of d
    B = np.zeros((N, M), dtype=complex)
    for d in range(1, M + 1):
        B[d - 1 :: d, d - 1][: N // d] = b[: N // d]
    ratios = np.linalg.norm(B @ psi, axis=0)
    sv = np.linalg.svd(B, compute_uv=False)
    return StabilityReport(float(ratios.min()), float(ratios.max()), float(sv[-1]), float(sv[0]), trials, M, N, seed)


# ------------------------------------------------------ half-plane scan

VERDICTS = ("BOUNDED", "UNBOUNDED_SUSPECTED", "NEAR_ZERO_SUSPECTED", "INCONCLUSIVE")
RE_MIN_FLOOR = 0.01
REFINE_FACTOR = 100


@dataclass(frozen=True)
class Region:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.re_min < RE_MIN_FLOOR - 1e-15:
            raise DomainError(f"scan region must keep Re(s) >= {RE_MIN_FLOOR}")
        if self.re_max < self.re_min or self.im_max < self.im_min:
            raise DomainError("empty scan region")


@dataclass
class ScanReport:
    region: Region
    step: float
    min_abs: float
    max_abs: float
    argmin: complex
    argmax: complex
    masked_cells: list
    verdict: str
    thresholds: dict
    max_error: float = 0.0
    cells: int = 0

    def to_json(self) -> str:
        r = self.region
        return dumps_json(
            {
                "region": {"re_min": r.re_min, "re_max": r.re_max, "im_min": r.im_min, "im_max": r.im_max},
                "step": self.step,
                "min_abs": self.min_abs,
                "max_abs": self.max_abs,
                "argmin": [self.argmin.real, self.argmin.imag],
                "argmax": [self.argmax.real, self.argmax.imag],
                "masked_cells": [[z.real, z.imag] for z in self.masked_cells],
                "verdict": self.verdict,
                "thresholds": self.thresholds,
            }
        )


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    if math.isclose(lo, -hi, abs_tol=1e-15) and hi > 0:
        J = int(math.floor(hi / step + 1e-9))
        return np.arange(-J, J + 1) * step
    J = int(math.floor((hi - lo) / step + 1e-9))
    return lo + np.arange(J + 1) * step


def _grid_abs(a: CoeffVector, re: np.ndarray, im: np.ndarray, target: float, best_effort: bool):
    """|L_a| on re x im (rows = re).  Real generators are mirrored in im."""
    real = not np.any(a.values.imag)
    S = re[:, None] + 1j * im[None, :]
    if real and im.size > 1 and np.array_equal(im, -im[::-1]):
        half = im >= 0
        v, e, m = l_function_grid(a, S[:, half].ravel(), target, best_effort)
        shape = (re.size, int(half.sum()))
        v, e, m = np.abs(v).reshape(shape), e.reshape(shape), m.reshape(shape)
        neg = np.flatnonzero(~half)
        # column for -t is the column for +t in the evaluated half
        idx = np.searchsorted(im[half], -im[neg])
        absv = np.concatenate([v[:, idx], v], axis=1)
        err = np.concatenate([e[:, idx], e], axis=1)
        msk = np.concatenate([m[:, idx], m], axis=1)
        return S, absv, err, msk
    v, e, m = l_function_grid(a, S.ravel(), target, best_effort)
    return S, np.abs(v).reshape(S.shape), e.reshape(S.shape), m.reshape(S.shape)


def halfplane_scan(
    a: CoeffVector,
    region: Region,
    step: float,
    thresholds: Optional[dict] = None,
    refine: bool = True,
    target_abs_err: float = 1e-10,
    best_effort: bool = False,
) -> ScanReport:
    """Grid scan of |L_a(s)| over ``region`` with one refinement pass.

    The refinement re-samples a (2*REFINE_FACTOR+1)^2 patch of spacing
    step/REFINE_FACTOR around the grid argmax and argmin (clipped to the
    region).  Verdicts compare the extremes against ``thresholds`` (hi=1e3,
    lo=1e-3 by default); INCONCLUSIVE when the certified error of the
    evaluation is not below ``lo`` or no finite cell remains.
    """
    th = {"hi": 1e3, "lo": 1e-3}
    if thresholds:
        th.update(thresholds)
    if not step > 0:
        raise DomainError("step must be positive")
    re = _axis(region.re_min, region.re_max, step)
    im = _axis(region.im_min, region.im_max, step)
    S, absv, err, msk = _grid_abs(a, re, im, target_abs_err, best_effort)
    pts, vals, errs, masks = [S.ravel()], [absv.ravel()], [err.ravel()], [msk.ravel()]

    def extremes():
        s = np.concatenate(pts)
        v = np.concatenate(vals)
        ok = ~np.concatenate(masks) & np.isfinite(v)
        if not ok.any():
            return None
        idx = np.flatnonzero(ok)
        return s, v, idx[np.argmin(v[ok])], idx[np.argmax(v[ok])]

    ext = extremes()
    if ext is not None and refine:
        s0, v0, imin, imax = ext
        fine = step / REFINE_FACTOR
        offs = np.arange(-REFINE_FACTOR, REFINE_FACTOR + 1) * fine
        for centre in (s0[imax], s0[imin]):
            rr = centre.real + offs
            rr = rr[(rr >= region.re_min - 1e-12) & (rr <= region.re_max + 1e-12)]
            ii = centre.imag + offs
            ii = ii[(ii >= region.im_min - 1e-12) & (ii <= region.im_max + 1e-12)]
            Sr, ar, er, mr = _grid_abs(a, rr, ii, target_abs_err, best_effort)
            pts.append(Sr.ravel())
            vals.append(ar.ravel())
            errs.append(er.ravel())
            masks.append(mr.ravel())
        ext = extremes()

    all_pts = np.concatenate(pts)
    all_masks = np.concatenate(masks)
    masked_cells = [complex(z) for z in all_pts[all_masks]]
    all_err = np.concatenate(errs)
    if ext is None:
        return ScanReport(region, step, math.nan, math.nan, complex(math.nan, math.nan),
                          complex(math.nan, math.nan), masked_cells, "INCONCLUSIVE", th, math.inf, all_pts.size)
    s, v, imin, imax = ext
    min_abs, max_abs = float(v[imin]), float(v[imax])
    max_error = float(np.max(np.where(all_masks, 0.0, all_err)))
    if not math.isfinite(max_error) or max_error >= th["lo"]:
        verdict = "INCONCLUSIVE"
    elif max_abs > th["hi"]:
        verdict = "UNBOUNDED_SUSPECTED"
    elif min_abs < th["lo"]:
        verdict = "NEAR_ZERO_SUSPECTED"
    else:
        verdict = "BOUNDED"
    return ScanReport(region, step, min_abs, max_abs, complex(s[imin]), complex(s[imax]),
                      masked_cells, verdict, th, max_error, all_pts.size)
