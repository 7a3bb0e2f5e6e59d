"""Command line: figure, gram, scan, expand, inverse, check.

Exit codes: 0 success, 1 usage or configuration error, 2 a numerical
tolerance failed.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import dilation_basis as db
from . import expansion as ex
from .dirichlet_arith import CoeffVector, dirichlet_convolve, fmt
from .errors import NumericalFailure, ZetadilError
from .special_fn import phi_polylog, zeta, zeta_grid

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
FIGURE_TOL = 1e-8


@dataclass
class RunConfig:
    k: Optional[float] = None
    coeffs: Optional[Path] = None
    delta: bool = False
    decay_k: float = 1.0
    modes: Optional[int] = None
    gram_size: Optional[int] = None
    trunc: Optional[int] = None
    points: int = 512
    curves: int = 5
    re_min: float = 0.01
    re_max: float = 4.0
    im_max: float = 50.0
    step: float = 0.05
    hi: float = 1e3
    lo: float = 1e-3
    seed: int = 0
    target: str = "quadratic"
    out: Path = Path(".")
    fmt: Optional[str] = None

    def __post_init__(self):
        chosen = sum([self.k is not None, self.coeffs is not None, self.delta])
        if chosen > 1:
            raise ValueError("choose exactly one of --k, --coeffs, --delta")
        if chosen == 0:
            self.k = 2.0
        for name in ("modes", "gram_size", "trunc", "points", "curves"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if not self.step > 0:
            raise ValueError("--step must be positive")

    @property
    def family(self) -> str:
        if self.delta:
            return "delta"
        if self.coeffs is not None:
            return "coeffs"
        return "polylog"

    def system(self, N: int) -> db.DilatedSystem:
        if self.family == "delta":
            return db.DilatedSystem.delta(N)
        if self.family == "polylog":
            return db.DilatedSystem.polylog(self.k, N)
        # a coefficient file defines the whole generator: zero past its last row
        cv = CoeffVector.from_csv(self.coeffs, finite=True)
        if cv.N < N:
            cv = cv.truncated(N)
        return db.DilatedSystem(cv, family=f"coeffs:{self.coeffs.name}", decay_k=self.decay_k)

    def generator(self, N: int) -> CoeffVector:
        """Generator for series evaluation (power families stay closed form)."""
        return self.system(N).a


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text(text, encoding="utf-8", newline="")
    return path


# ------------------------------------------------------------- figure


def _svg(x: np.ndarray, curves: list) -> str:
    W, H, pad = 800.0, 400.0, 40.0
    ymin = min(float(c.min()) for c in curves)
    ymax = max(float(c.max()) for c in curves)
    span = ymax - ymin or 1.0
    colours = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]

    def px(v):
        return pad + v * (W - 2 * pad)

    def py(v):
        return H - pad - (v - ymin) / span * (H - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(W)}" height="{fmt(H)}" viewBox="0 0 {fmt(W)} {fmt(H)}">',
        f'<line x1="{fmt(px(0))}" y1="{fmt(py(0))}" x2="{fmt(px(1))}" y2="{fmt(py(0))}" stroke="#888" stroke-width="1"/>',
    ]
    for i, c in enumerate(curves):
        pts = " ".join(f"{fmt(px(a))},{fmt(py(b))}" for a, b in zip(x, c))
        colour = colours[i % len(colours)]
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{fmt(W - pad + 4)}" y="{fmt(pad + 14 * i)}" font-size="11" fill="{colour}">n={i + 1}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def figure_data(cfg: RunConfig):
    """x grid, phi_n values from the coefficient route, and the cross-check error."""
    L = cfg.points + 1
    if cfg.family == "polylog":
        K = cfg.trunc or 2**22
        sysm = cfg.system(K)
    else:
        # finite generator: phi_n is exact once K covers n * len(a)
        base = 1 if cfg.family == "delta" else CoeffVector.from_csv(cfg.coeffs).N
        K = cfg.trunc or cfg.curves * base
        sysm = cfg.system(max(K, cfg.curves))
    x = np.arange(1, L) / L
    cols, err = [], 0.0
    for n in range(1, cfg.curves + 1):
        vals = db.evaluate_uniform(db.phi_coefficients(sysm, n, K), L)
        if cfg.family == "polylog":
            ref = phi_polylog(cfg.k, n * x)
        elif cfg.family == "delta":
            ref = math.sqrt(2.0) * np.sin(n * math.pi * x)
        else:
            ref = db.evaluate(db.phi_coefficients(sysm, n, K), x)
        err = max(err, float(np.max(np.abs(vals - ref))))
        cols.append(vals.real)
    return x, cols, err


def cmd_figure(cfg: RunConfig) -> int:
    x, cols, err = figure_data(cfg)
    header = ["x"] + [f"phi_{n}" for n in range(1, len(cols) + 1)]
    rows = [",".join(header), ",".join(["0"] * len(header))]
    for i, xi in enumerate(x):
        rows.append(",".join([fmt(xi)] + [fmt(c[i]) for c in cols]))
    if cfg.fmt in (None, "csv"):
        _write(cfg, "figure.csv", "\n".join(rows) + "\n")
    if cfg.fmt in (None, "svg"):
        _write(cfg, "figure.svg", _svg(x, cols))
    print(f"figure: {len(cols)} curves x {x.size} points, cross-check max error {err:.3e}")
    if not err <= FIGURE_TOL:
        print(f"cross-check error exceeds {FIGURE_TOL:g}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# --------------------------------------------------------------- gram


def cmd_gram(cfg: RunConfig) -> int:
    M = cfg.gram_size or 16
    K = cfg.trunc or 2**16 * M
    sysm = cfg.system(math.ceil(K / M))
    g = db.gram_matrix(sysm, M, K)
    _write(cfg, "gram.json", g.to_json())
    if cfg.fmt == "csv":
        _write(cfg, "gram_entries.csv", g.entries_csv())
    print(g.to_json(), end="")
    return EXIT_OK


# --------------------------------------------------------------- scan


def cmd_scan(cfg: RunConfig) -> int:
    a = cfg.generator(cfg.modes or 4096)
    region = ex.Region(cfg.re_min, cfg.re_max, -cfg.im_max, cfg.im_max)
    rep = ex.halfplane_scan(a, region, cfg.step, {"hi": cfg.hi, "lo": cfg.lo})
    text = rep.to_json()
    _write(cfg, "scan.json", text)
    print(text, end="")
    return EXIT_OK


# ------------------------------------------------------------- expand

TARGETS = {
    "quadratic": lambda x: x * (1 - x),
    "e3": lambda x: math.sqrt(2.0) * np.sin(3 * math.pi * x),
}


def cmd_expand(cfg: RunConfig) -> int:
    N = cfg.modes or 4095
    sysm = cfg.system(N)
    if cfg.target in TARGETS:
        psi = ex.sine_coefficients(TARGETS[cfg.target], N)
    elif cfg.target.startswith("polylog:"):
        kk = float(cfg.target.split(":", 1)[1])
        psi = ex.sine_coefficients(lambda x: phi_polylog(kk, x), N)
    else:
        psi = db.SineVector(CoeffVector.from_csv(Path(cfg.target)).truncated(N), method="file")
    res = ex.analyze(sysm, psi)
    _write(cfg, "expansion.csv", res.to_csv())
    _write(cfg, "expansion.json", res.summary_json())
    print(res.summary_json(), end="")
    return EXIT_OK


# ------------------------------------------------------------ inverse


def cmd_inverse(cfg: RunConfig) -> int:
    N = cfg.modes or 64
    b = cfg.system(N).dual(N)
    text = b.to_csv()
    _write(cfg, "dual.csv", text)
    if cfg.out == Path("-"):
        print(text, end="")
    return EXIT_OK


# -------------------------------------------------------------- check


@dataclass
class CheckRow:
    name: str
    value: float
    tolerance: float
    passed: bool
    note: str = ""


def _row(name, value, tol, ok=None, note="") -> CheckRow:
    passed = (value <= tol) if ok is None else ok
    return CheckRow(name, float(value), float(tol), bool(passed), note)


def run_checks(cfg: RunConfig) -> list:
    """Invariant suite: family-dependent checks on the configured generator,
    then fixed anchors (zeta values, generator checks, k=0.6 conditioning)."""
    rows = []
    N = cfg.modes or 256
    sysm = cfg.system(max(N, 64))
    a, b = sysm.a, sysm.dual(N)
    delta = np.zeros(N, dtype=complex)
    delta[0] = 1
    rows.append(_row("convolution_inverse", np.max(np.abs(dirichlet_convolve(a, b, N).values - delta)), 1e-13))
    rng = np.random.default_rng(cfg.seed)
    u = CoeffVector(rng.standard_normal(N) + 1j * rng.standard_normal(N))
    v = CoeffVector(rng.standard_normal(N) + 1j * rng.standard_normal(N))
    uv, vu = dirichlet_convolve(u, v, N).values, dirichlet_convolve(v, u, N).values
    rows.append(_row("convolution_commutative", np.max(np.abs(uv - vu) / np.maximum(np.abs(uv), 1e-300)), 1e-14))
    rows.append(_row("biorthogonality_M64", db.biorthogonality_check(sysm, 64), 1e-12))
    psi = db.SineVector.from_array(rng.standard_normal(N) + 1j * rng.standard_normal(N))
    back = ex.synthesize(sysm, ex.analyze(sysm, psi).c).values
    rows.append(_row("round_trip", np.max(np.abs(back - psi.values)), 1e-12))

    corridor = db.riesz_corridor(sysm, 50.0, 0.01)
    half = ex.halfplane_scan(sysm.a, ex.Region(0.01, 4.0, -50.0, 50.0), 0.05, refine=False)
    gsys = cfg.system(4096)
    for M in (16, 32, 64):
        g = db.gram_matrix(gsys, M, min(2**18, gsys.N * M))
        slack = g.tail_bound + corridor.error_bound + 1e-12
        ok = g.lambda_min >= corridor.lo - slack and g.lambda_max <= corridor.hi + slack
        excess = max(corridor.lo - g.lambda_min, g.lambda_max - corridor.hi, 0.0)
        rows.append(_row(f"corridor_containment_M{M}", excess, slack, ok,
                         f"lambda=[{g.lambda_min:.6g},{g.lambda_max:.6g}] corridor=[{corridor.lo:.6g},{corridor.hi:.6g}]"))
        lo2, hi2 = half.min_abs**2, half.max_abs**2
        ok2 = g.lambda_min >= lo2 - slack and g.lambda_max <= hi2 + slack
        excess2 = max(lo2 - g.lambda_min, g.lambda_max - hi2, 0.0)
        rows.append(_row(f"halfplane_containment_M{M}", excess2, slack, ok2,
                         f"lambda=[{g.lambda_min:.6g},{g.lambda_max:.6g}] halfplane=[{lo2:.6g},{hi2:.6g}]"))

    bad = db.DilatedSystem.polylog(0.6, 2**15)
    conds = [db.gram_matrix(bad, M, 2**18).cond for M in (8, 16, 32, 64)]
    rising = all(c2 > c1 for c1, c2 in zip(conds, conds[1:]))
    rows.append(_row("conditioning_growth_k0.6", conds[-1], math.inf, rising, " ".join(f"{c:.6g}" for c in conds)))

    rows.append(_row("zeta_2", abs(zeta(2).value - math.pi**2 / 6), 1e-10))
    rows.append(_row("zeta_4", abs(zeta(4).value - math.pi**4 / 90), 1e-10))
    t = np.arange(14000, 14301) / 1000
    zmin = float(np.min(np.abs(zeta_grid(0.5 + 1j * t)[0])))
    rows.append(_row("zeta_first_zero_scan", zmin, 1e-3))

    ident = max(db.dilation_sine_identity(n, 31) for n in range(1, 9))
    rows.append(_row("dilation_identity", ident, 1e-12))
    f = lambda y: math.sin(math.pi * y)  # noqa: E731
    gen = max(db.dilation_generator_check(f, xx, math.log(1.5), 1e-7).generator_error for xx in GENERATOR_POINTS)
    rows.append(_row("generator_finite_difference", gen, 1e-6))
    return rows


GENERATOR_POINTS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.55, 0.6)


def cmd_check(cfg: RunConfig) -> int:
    rows = run_checks(cfg)
    lines = ["check,value,tolerance,status,note"]
    for r in rows:
        lines.append(f"{r.name},{fmt(r.value)},{fmt(r.tolerance) if math.isfinite(r.tolerance) else 'inf'},"
                     f"{'PASS' if r.passed else 'FAIL'},{r.note}")
    text = "\n".join(lines) + "\n"
    _write(cfg, "check.csv", text)
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:32s} {r.value:.3e}  {r.note}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC


# -------------------------------------------------------------- parser

COMMANDS = {
    "figure": cmd_figure,
    "gram": cmd_gram,
    "scan": cmd_scan,
    "expand": cmd_expand,
    "inverse": cmd_inverse,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zetadil", description="Dilation-generated Riesz systems on L2(0,1).")
    p.add_argument("command", choices=sorted(COMMANDS))
    fam = p.add_mutually_exclusive_group()
    fam.add_argument("--k", type=float, help="polylog family a_n = n^-k (default 2)")
    fam.add_argument("--coeffs", type=Path, help="generator CSV with header n,re,im")
    fam.add_argument("--delta", action="store_true", help="orthonormal sine system")
    p.add_argument("--decay-k", type=float, default=1.0, help="decay exponent assumed for --coeffs")
    p.add_argument("--modes", type=int, help="coefficient truncation N")
    p.add_argument("--gram-size", type=int, help="Gram matrix size M")
    p.add_argument("--trunc", type=int, help="sum truncation K")
    p.add_argument("--points", type=int, default=512, help="figure grid points")
    p.add_argument("--curves", type=int, default=5, help="figure curves phi_1..phi_n")
    p.add_argument("--re-min", type=float, default=0.01)
    p.add_argument("--re-max", type=float, default=4.0)
    p.add_argument("--im-max", type=float, default=50.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--hi", type=float, default=1e3, help="unbounded threshold")
    p.add_argument("--lo", type=float, default=1e-3, help="near-zero threshold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", default="quadratic", help="expand target: quadratic, e3, polylog:<k> or a CSV path")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--format", dest="fmt", choices=["csv", "json", "svg"])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args = vars(ns)
    command = args.pop("command")
    try:
        cfg = RunConfig(**args)
        return COMMANDS[command](cfg)
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, ZetadilError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
