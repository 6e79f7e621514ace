"""Regression-style numerical probes for the kernel and decay estimates.

Every probe is deterministic given its seed and grid; verdicts compare
slopes or ratio stability, never absolute constants.  Left-hand sides
come from the kernel/norm modules so no formula is duplicated here.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import (bilinear_kernel_batch, bilinear_weighted_l2,
                       linear_first_layer_weighted_l2, restriction_apply_l2,
                       second_layer_channel_l2, sobolev_norm_1d)
from .dims import Dims
from .fields import GriddedField, SpectralField, lp_norm, mixed_norm, synthesize
from .geometry import Point, ball_volume, control_distance
from .grid import Grid, GridSpec, make_grid
from .hermite import multi_indices_upto
from .report import ProbeReport, log2_safe
from .reductions import parallel_map
from .riesz import (bilinear_apply_separated, build_expansion,
                    fourier_coeff_batch)
from .symbols import (DyadicCutoff, DyadicPiece, Symbol1D, bump_symbol_1d,
                      dyadic_piece_symbol, indicator_symbol_1d, tensor_symbol)
from .thresholds import threshold

SLOPE_TOL = 0.15          # log2 slope tolerance at desk scale
RATIO_GROWTH_TOL = 0.05   # allowed ratio growth per refinement doubling
DECAY_SLOPE_TOL = 0.1     # decay probes must fit at or below -this


# ---------------------------------------------------------------------------
# probe grids

_GRID_SPECS = {
    "default": GridSpec(),
    "decay": GridSpec(x1_extent=28.0, x1_count=64, x2_count=512,
                      lambda_min=1.0 / 128.0, lambda_max=1.0, lambda_count=128),
    "weighted": GridSpec(x1_extent=144.0, x1_count=224, x2_count=1024,
                         lambda_min=1.0 / 512.0, lambda_max=0.5,
                         lambda_count=256),
    "riesz": GridSpec(x1_extent=28.0, x1_count=56, x2_count=128,
                      lambda_min=1.0 / 64.0, lambda_max=0.5, lambda_count=32),
    "dilation": GridSpec(x1_extent=16.0, x1_count=64, x2_count=256,
                         lambda_min=1.0 / 16.0, lambda_max=4.0,
                         lambda_count=64),
}

_GRID_CACHE: dict = {}


def probe_grid(name: str, refine: int = 1) -> Grid:
    """Named probe grid; ``refine`` doubles the spatial resolution."""
    if name not in _GRID_SPECS:
        raise KeyError(f"unknown grid {name!r}; available {sorted(_GRID_SPECS)}")
    key = (name, refine)
    if key not in _GRID_CACHE:
        spec = _GRID_SPECS[name]
        if refine != 1:
            from dataclasses import replace
            spec = replace(spec, x1_count=spec.x1_count * refine,
                           x2_count=spec.x2_count * refine)
        _GRID_CACHE[key] = make_grid(Dims(spec.d1, spec.d2), spec)
    return _GRID_CACHE[key]


# ---------------------------------------------------------------------------
# test-function families

FAMILIES = ("hermite-bump", "two-scale")


def family_fields(name: str, grid: Grid, seed: int,
                  band: tuple[float, float] | None = None,
                  max_degree: int = 4, stride: int = 1) -> SpectralField:
    """Named, seeded field families.

    * ``hermite-bump``: random degree <= 4 coefficients on a dyadic
      frequency band, amplitudes damped geometrically in the degree.
    * ``two-scale``: the same construction split across two bands a
      factor 4 apart, stressing both branches of the ball-volume formula.
    """
    if name not in FAMILIES:
        raise KeyError(f"unknown family {name!r}; available {FAMILIES}")
    name_tag = int.from_bytes(hashlib.sha256(name.encode()).digest()[:4],
                              "little")
    rng = np.random.default_rng(np.random.SeedSequence([name_tag, seed]))
    if band is None:
        band = (1.0 / 8.0, 0.96)
    if name == "two-scale":
        lo, hi = band
        bands = [(lo, min(2 * lo, hi)), (min(4 * lo, hi), min(8 * lo, hi))]
    else:
        bands = [band]
    sel = np.zeros(grid.n_lambda, dtype=bool)
    for lo, hi in bands:
        sel |= (grid.lambda_abs >= lo - 1e-12) & (grid.lambda_abs <= hi + 1e-12)
    idx = np.where(sel)[0][::stride]
    if idx.size == 0:
        raise ValueError(f"family band {band} misses every grid node")
    support = grid.lambda_points[idx]
    n_mu = len(multi_indices_upto(grid.dims.d1, max_degree))
    degs = np.array([sum(mu) for mu in
                     multi_indices_upto(grid.dims.d1, max_degree)])
    amp = 0.5 ** degs
    coeffs = (rng.normal(size=(idx.size, n_mu))
              + 1j * rng.normal(size=(idx.size, n_mu))) * amp
    return SpectralField(grid.dims, support, max_degree, coeffs)


def live_eigenvalues(f: SpectralField, cap: float = 1.0) -> np.ndarray:
    ev = np.unique(f.eigenvalues.reshape(-1))
    return ev[ev <= cap + 1e-12]


# ---------------------------------------------------------------------------
# pointwise kernel probe

KERNEL_VARIANTS = ("xx", "xz", "xy", "yz")


def _stratified_triples(seed: int, per_band: int = 8,
                        scales=(0.5, 1.0, 2.0, 4.0, 8.0)) -> list:
    """Reproducible (x, y, z) triples stratified by distance scale."""
    rng = np.random.default_rng(np.random.SeedSequence([0x7A, seed]))
    triples = []
    for s_y in scales:
        for _ in range(per_band):
            x1 = rng.uniform(-3, 3, 1)
            x2 = rng.uniform(-8, 8, 1)
            s_z = float(rng.choice(scales))
            y1 = x1 + rng.uniform(-s_y, s_y, 1)
            y2 = x2 + rng.uniform(-1, 1, 1) * max(
                s_y * s_y, s_y * (abs(x1[0]) + abs(y1[0])))
            z1 = x1 + rng.uniform(-s_z, s_z, 1)
            z2 = x2 + rng.uniform(-1, 1, 1) * max(
                s_z * s_z, s_z * (abs(x1[0]) + abs(z1[0])))
            triples.append(((x1, x2), (y1, y2), (z1, z2)))
    return triples


def _volume_factor(variant: str, x, y, z) -> float:
    px, py, pz = Point(*x), Point(*y), Point(*z)
    if variant == "xx":
        return ball_volume(px, 1.0) ** 2
    if variant == "xz":
        return ball_volume(px, 1.0) * ball_volume(pz, 1.0)
    if variant == "xy":
        return ball_volume(px, 1.0) * ball_volume(py, 1.0)
    if variant == "yz":
        return ball_volume(py, 1.0) * ball_volume(pz, 1.0)
    raise KeyError(f"unknown variant {variant!r}; available {KERNEL_VARIANTS}")


_KERNEL_SAMPLE_CACHE: dict = {}


def _kernel_samples(grid: Grid, alpha: float, j: int, seed: int,
                    triples) -> np.ndarray:
    """|kernel_j| at the sample triples; cached (weights vary per probe,
    kernel values do not)."""
    key = (id(grid), alpha, j, seed)
    if key not in _KERNEL_SAMPLE_CACHE:
        sym = dyadic_piece_symbol(DyadicPiece(j, alpha))
        kv = bilinear_kernel_batch(sym, [t[0] for t in triples],
                                   [t[1] for t in triples],
                                   [t[2] for t in triples], grid)
        _KERNEL_SAMPLE_CACHE[key] = np.abs(kv)
    return _KERNEL_SAMPLE_CACHE[key]


def pointwise_kernel_probe(alpha: float, beta1: float, beta2: float,
                           j_range=range(1, 7), variant: str = "xx",
                           seed: int = 0, grid: Grid | None = None,
                           workers: int | None = None) -> ProbeReport:
    """Slope check of the weighted pointwise kernel bound.

    For each j, S_j is the max over stratified samples of
    |kernel_j(x,y,z)| (1+dist(x,y))^{beta1} (1+dist(x,z))^{beta2} times
    the selected volume-weight combination; passes when the fitted log2
    slope stays at or below beta1 + beta2 + 1/2 + tolerance.
    """
    if beta1 < 0 or beta2 < 0:
        raise ValueError("beta exponents must be >= 0")
    grid = grid or probe_grid("decay")
    triples = _stratified_triples(seed)
    if not triples:
        raise ValueError("empty sample set")
    wts = np.array([
        (1.0 + control_distance(Point(*x), Point(*y))) ** beta1
        * (1.0 + control_distance(Point(*x), Point(*z))) ** beta2
        * _volume_factor(variant, x, y, z)
        for x, y, z in triples])

    def one_j(j):
        return float(np.max(_kernel_samples(grid, alpha, j, seed, triples)
                            * wts))

    j_values = list(j_range)
    s = parallel_map(one_j, j_values, workers)
    report = ProbeReport.from_samples(j_values, log2_safe(s),
                                      max_ratio=max(s),
                                      alpha=alpha, beta1=beta1, beta2=beta2,
                                      variant=variant, values=list(s))
    bound = beta1 + beta2 + 0.5 + SLOPE_TOL
    if max(s) == 0.0:
        report.verdict = "DEGENERATE-PASS"
    else:
        report.verdict = "PASS" if report.slope <= bound else "FAIL"
    report.details["slope_bound"] = bound
    return report


# ---------------------------------------------------------------------------
# weighted Plancherel probes

PLANCHEREL_KINDS = ("linear_first_layer", "bilinear", "second_layer",
                    "truncated")

_BASE_POINTS = (0.5, 2.0, 5.0, 12.0, 30.0)


def _first_layer_rhs(F: Symbol1D, gamma: float, y1_norm: float,
                     dims: Dims) -> float:
    """Closed-form right side: weighted eta-integral of |F|^2 with the
    min(eta^{d2/2-gamma}, |y'|^{2gamma-d2}) weight."""
    d, d2 = dims.total_dim, dims.d2
    lo, hi = F.support
    knee = y1_norm ** -2.0 if y1_norm > 0 else np.inf

    def piece(a, b, small_eta):
        if b <= a:
            return 0.0
        nodes, w = np.polynomial.legendre.leggauss(200)
        eta = 0.5 * (b + a) + 0.5 * (b - a) * nodes
        vals = np.abs(np.asarray(F(eta))) ** 2 * eta ** (d / 2.0 - 1.0)
        vals = vals * (eta ** (d2 / 2.0 - gamma) if small_eta
                       else y1_norm ** (2 * gamma - d2))
        return float(np.sum(w * vals) * 0.5 * (b - a))

    split = min(max(knee, lo), hi)
    return piece(lo, split, True) + piece(split, hi, False)


def weighted_plancherel_probe(kind: str, gamma1: float = 0.0,
                              gamma2: float = 0.0, n1: float = 1.0,
                              n2: float = 0.0, m_range=range(2, 6),
                              seed: int = 0, refine: int = 1,
                              check_refinement: bool = True,
                              workers: int | None = None) -> ProbeReport:
    """Ratio/slope probes for the four weighted-kernel estimates.

    * linear_first_layer: first-layer weight |x'|^{2 gamma1}, gamma1 in
      [0, d2/2); ratio LHS/RHS over base points, refinement-stable.
    * bilinear: double kernel integral against the product frequency
      weight at gamma = 0; ratio over base points.
    * second_layer: |x''-y''| weights with gamma1, gamma2 in [0, d2/2);
      RHS is the product Sobolev norm.
    * truncated: frequency-size cutoffs at scales M; log2 LHS vs M slope
      compared with 2*n1 - d2 (and the ratio against the closed RHS).
    """
    if kind not in PLANCHEREL_KINDS:
        raise KeyError(f"unknown kind {kind!r}; available {PLANCHEREL_KINDS}")
    grid = probe_grid("weighted", refine)
    dims = grid.dims
    half = dims.d2 / 2.0
    if kind in ("linear_first_layer",) and not 0 <= gamma1 < half:
        raise ValueError(f"gamma1 must lie in [0, {half})")
    if kind == "second_layer" and not (0 <= gamma1 < half
                                       and 0 <= gamma2 < half):
        raise ValueError(f"gamma exponents must lie in [0, {half})")
    if kind == "truncated" and (n1 < 0 or n2 < 0):
        raise ValueError("cutoff orders must be >= 0")

    prof = bump_symbol_1d(0.05, 0.45)
    if kind == "linear_first_layer":
        symbols = [indicator_symbol_1d(0.0, 0.45), prof]
        ys = [5.0, 10.0, 20.0, 40.0]

        def ratios(gr):
            out = []
            for F in symbols:
                for y1 in ys:
                    lhs = linear_first_layer_weighted_l2(
                        F, (np.array([y1]), np.array([0.0])), gr, gamma1)
                    rhs = _first_layer_rhs(F, gamma1, y1, dims)
                    out.append(lhs / rhs)
            return np.array(out)

        base = ratios(grid)
        report = ProbeReport.from_samples(
            np.log2(np.array(ys + ys)), log2_safe(base),
            max_ratio=float(np.max(base)), gamma=gamma1, kind=kind,
            ratios=base.tolist())
        if check_refinement:
            fine = ratios(probe_grid("weighted", 2 * refine))
            growth = float(np.max(fine / np.maximum(base, 1e-300))) - 1.0
            report.details["refinement_growth"] = growth
            report.verdict = ("PASS" if growth < RATIO_GROWTH_TOL else "FAIL")
        else:
            report.verdict = "PASS"
        return report

    if kind == "bilinear":
        G = tensor_symbol(prof, prof)

        def ratios(gr):
            out = []
            for x1 in _BASE_POINTS:
                lhs = bilinear_weighted_l2(G, (np.array([x1]),
                                               np.array([0.0])), gr, 0.0, 0.0)
                rhs = (_first_layer_rhs(prof, 0.0, x1, dims) ** 2)
                out.append(lhs / rhs)
            return np.array(out)

        base = ratios(grid)
        report = ProbeReport.from_samples(
            np.log2(np.array(_BASE_POINTS)), log2_safe(base),
            max_ratio=float(np.max(base)), kind=kind, ratios=base.tolist())
        if check_refinement:
            fine = ratios(probe_grid("weighted", 2 * refine))
            growth = float(np.max(fine / np.maximum(base, 1e-300))) - 1.0
            report.details["refinement_growth"] = growth
            report.verdict = ("PASS" if growth < RATIO_GROWTH_TOL else "FAIL")
        else:
            report.verdict = "PASS"
        return report

    if kind == "second_layer":
        rhs = (sobolev_norm_1d(prof, gamma1) * sobolev_norm_1d(prof, gamma2)) ** 2

        def ratios(gr):
            out = []
            for x1 in _BASE_POINTS:
                c1 = second_layer_channel_l2(prof, gr, np.array([x1]), gamma1)
                c2 = second_layer_channel_l2(prof, gr, np.array([x1]), gamma2)
                out.append(c1 * c2 / rhs)
            return np.array(out)

        base = ratios(grid)
        report = ProbeReport.from_samples(
            np.log2(np.array(_BASE_POINTS)), log2_safe(base),
            max_ratio=float(np.max(base)), kind=kind,
            gamma1=gamma1, gamma2=gamma2, ratios=base.tolist())
        if check_refinement:
            fine = ratios(probe_grid("weighted", 2 * refine))
            growth = float(np.max(fine / np.maximum(base, 1e-300))) - 1.0
            report.details["refinement_growth"] = growth
            report.verdict = ("PASS" if growth < RATIO_GROWTH_TOL else "FAIL")
        else:
            report.verdict = "PASS"
        return report

    # truncated: channel slope in the first cutoff index; the bilinear
    # left side factors over channels for a tensor symbol, so the slope
    # and ratio live in channel one while channel two is held fixed.
    s1 = sobolev_norm_1d(prof, n1) ** 2
    s2 = sobolev_norm_1d(prof, n2) ** 2
    m_values = list(m_range)

    def chan(m, order):
        vals = [second_layer_channel_l2(prof, grid, np.array([x1]), order,
                                        cutoff=DyadicCutoff(m))
                for x1 in _BASE_POINTS]
        return float(np.mean(vals))

    chan1 = np.array(parallel_map(lambda m: chan(m, n1), m_values, workers))
    m2_fixed = m_values[0]
    chan2 = chan(m2_fixed, n2)
    target = 2.0 * n1 - dims.d2
    rhs1 = np.array([2.0 ** (m * target) * s1 for m in m_values])
    rhs2 = 2.0 ** (m2_fixed * (2.0 * n2 - dims.d2)) * s2
    report = ProbeReport.from_samples(
        m_values, np.log2(chan1),
        max_ratio=float(np.max(chan1 / rhs1) * chan2 / rhs2),
        kind=kind, n1=n1, n2=n2, channel_values=chan1.tolist())
    report.details["slope_target"] = target
    report.verdict = ("PASS" if abs(report.slope - target) <= SLOPE_TOL
                      else "FAIL")
    return report


# ---------------------------------------------------------------------------
# coefficient decay probe

def coefficient_decay_probe(alpha: float, beta: float,
                            j_range=range(2, 9), l_max: int = 512,
                            n_eta: int = 257, shell_clear: bool = False,
                            workers: int | None = None) -> ProbeReport:
    """Slope of the weighted sup-norm coefficient maxima in j.

    D_j = max over |l| <= l_max of sup_eta1 |coeff_{j,l}| (1+|l|)^{1+beta};
    passes when the fitted slope stays at or below -alpha + beta + tol.

    Over the full eta1 interval the zero extension of the piece jumps at
    the second variable's origin wherever 1 - eta1 lies inside the shell,
    and the jump's 1/l coefficient tail makes the measured slope track
    -alpha rather than the sharp -alpha + beta.  ``shell_clear`` takes
    the sup over eta1 below the shell window instead, where coefficients
    decay superalgebraically and the sharp rate is visible.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0 (strictly positive in the bound)")
    ls = np.arange(0, l_max + 1)
    weights = (1.0 + ls) ** (1.0 + beta)

    def one_j(j):
        hi = 1.0 - 2.0 ** (-j + 1) - 0.02 if shell_clear else 1.0
        eta1 = np.linspace(0.0, hi, n_eta)
        coeffs = fourier_coeff_batch(DyadicPiece(j, alpha), ls, eta1)
        sup = np.max(np.abs(coeffs), axis=1)
        return float(np.max(weights * sup))

    j_values = list(j_range)
    d = parallel_map(one_j, j_values, workers)
    report = ProbeReport.from_samples(j_values, log2_safe(d),
                                      max_ratio=max(d), alpha=alpha, beta=beta,
                                      l_max=l_max, values=list(d))
    bound = -alpha + beta + SLOPE_TOL
    report.verdict = "PASS" if report.slope <= bound else "FAIL"
    report.details["slope_bound"] = bound
    return report


# ---------------------------------------------------------------------------
# dyadic and mixed-norm decay probes

@dataclass(frozen=True)
class DecayProbeSpec:
    """Configuration of a geometric-decay probe at one exponent tuple."""

    alpha: float
    p1: float
    p2: float
    p: float
    j_range: tuple = (1, 2, 3, 4, 5, 6)
    family: str = "hermite-bump"
    seed: int = 0
    norm_kind: str = "lp"          # "lp" or "mixed(p,q)"
    mixed_q: float = 1.0

    def __post_init__(self):
        inv = (0.0 if math.isinf(self.p1) else 1.0 / self.p1) \
            + (0.0 if math.isinf(self.p2) else 1.0 / self.p2)
        target = 0.0 if math.isinf(self.p) else 1.0 / self.p
        if abs(inv - target) > 1e-12:
            raise ValueError(
                f"exponents violate the product relation: 1/p1 + 1/p2 = "
                f"{inv} != 1/p = {target}")


def _decay_fields(spec_family: str, seed: int, grid: Grid):
    f = family_fields(spec_family, grid, seed, band=(1.0 / 8.0, 0.96))
    g = family_fields(spec_family, grid, seed + 1, band=(1.0 / 8.0, 0.96))
    return f, g


def dyadic_decay_probe(spec: DecayProbeSpec, grid: Grid | None = None,
                       workers: int | None = None) -> ProbeReport:
    """Fitted slope of log2 ||piece_j(f, g)||_p / (||f||_p1 ||g||_p2) vs j.

    Passes at a strictly negative slope when alpha exceeds the corner
    threshold; below the threshold the report is labeled as the
    no-guarantee regime (nothing is claimed there) and still succeeds.
    """
    grid = grid or probe_grid("decay")
    f, g = _decay_fields(spec.family, spec.seed, grid)
    denom = (lp_norm(synthesize(f, grid), spec.p1)
             * lp_norm(synthesize(g, grid), spec.p2))
    if denom == 0.0:
        report = ProbeReport.from_samples(list(spec.j_range),
                                          [0.0] * len(list(spec.j_range)),
                                          max_ratio=0.0, alpha=spec.alpha)
        report.verdict = "DEGENERATE-PASS"
        return report

    def one_j(j):
        exp = build_expansion(DyadicPiece(j, spec.alpha),
                              eta1_samples=live_eigenvalues(f), l_cap=2048)
        out = bilinear_apply_separated(exp, f, g, grid)
        if spec.norm_kind == "lp":
            return lp_norm(out, spec.p)
        return mixed_norm(out, spec.p, spec.mixed_q)

    j_values = list(spec.j_range)
    n = parallel_map(one_j, j_values, workers)
    report = ProbeReport.from_samples(
        j_values, log2_safe(np.array(n) / denom),
        max_ratio=float(max(n) / denom), alpha=spec.alpha,
        exponents=(spec.p1, spec.p2, spec.p), values=list(n),
        denominator=denom)
    corner = threshold(spec.p1, spec.p2, grid.dims, "general").threshold
    report.details["corner_threshold"] = corner
    if max(n) == 0.0:
        report.verdict = "DEGENERATE-PASS"
    elif corner is not None and spec.alpha <= corner:
        report.verdict = "NO-GUARANTEE"
    else:
        report.verdict = ("PASS" if report.slope <= -DECAY_SLOPE_TOL
                          else "FAIL")
    return report


def mixed_norm_decay_probe(alpha: float, j_range=range(1, 7),
                           family: str = "hermite-bump", seed: int = 0,
                           grid: Grid | None = None,
                           workers: int | None = None) -> ProbeReport:
    """Decay probe in the mixed norms: output in the inner-2/3 outer-1
    norm against inputs in L1 x (inner-2, outer-sup)."""
    grid = grid or probe_grid("decay")
    f, g = _decay_fields(family, seed, grid)
    denom = (lp_norm(synthesize(f, grid), 1.0)
             * mixed_norm(synthesize(g, grid), 2.0, np.inf))
    if denom == 0.0:
        report = ProbeReport.from_samples(list(j_range),
                                          [0.0] * len(list(j_range)),
                                          max_ratio=0.0, alpha=alpha)
        report.verdict = "DEGENERATE-PASS"
        return report

    def one_j(j):
        exp = build_expansion(DyadicPiece(j, alpha),
                              eta1_samples=live_eigenvalues(f), l_cap=2048)
        out = bilinear_apply_separated(exp, f, g, grid)
        return mixed_norm(out, 2.0 / 3.0, 1.0)

    j_values = list(j_range)
    n = parallel_map(one_j, j_values, workers)
    report = ProbeReport.from_samples(
        j_values, log2_safe(np.array(n) / denom),
        max_ratio=float(max(n) / denom), alpha=alpha, values=list(n))
    d = grid.dims.total_dim
    report.details["threshold"] = (d + 1) / 2.0
    if max(n) == 0.0:
        report.verdict = "DEGENERATE-PASS"
    elif alpha <= (d + 1) / 2.0:
        report.verdict = "NO-GUARANTEE"
    else:
        report.verdict = ("PASS" if report.slope <= -DECAY_SLOPE_TOL
                          else "FAIL")
    return report


# ---------------------------------------------------------------------------
# restriction-estimate probe (first-layer weighted output bound)

def restriction_probe(gamma: float = 0.0, seed: int = 0,
                      refine: int = 1) -> ProbeReport:
    """Ratio probe for the weighted output estimate against ||F||_2 ||f||_1.

    Bump inputs at several positions; ratio bounded and refinement-stable.
    """
    grid = probe_grid("weighted", refine)
    half = grid.dims.d2 / 2.0
    if not 0 <= gamma < half:
        raise ValueError(f"gamma must lie in [0, {half})")
    F = indicator_symbol_1d(0.0, 0.45)
    f2 = math.sqrt(0.45)

    def make_bump(gr, x0, s):
        xx = gr.x1_points[:, 0]
        uu = gr.x2_points[:, 0]
        vals = (np.exp(-0.5 * ((xx - x0) / s) ** 2)[:, None]
                * np.exp(-0.5 * (uu / (4 * s)) ** 2)[None, :])
        return GriddedField(grid=gr, values=vals.astype(complex))

    def ratios(gr):
        out = []
        for x0, s in ((0.0, 0.7), (4.0, 1.0), (12.0, 1.5)):
            h = make_bump(gr, x0, s)
            l1 = lp_norm(h, 1.0)
            lhs = restriction_apply_l2(F, h, gamma)
            out.append(lhs / (f2 * l1))
        return np.array(out)

    base = ratios(grid)
    report = ProbeReport.from_samples(np.arange(base.size), log2_safe(base),
                                      max_ratio=float(np.max(base)),
                                      gamma=gamma, ratios=base.tolist())
    fine = ratios(probe_grid("weighted", 2 * refine))
    growth = float(np.max(fine / np.maximum(base, 1e-300))) - 1.0
    report.details["refinement_growth"] = growth
    report.verdict = "PASS" if growth < RATIO_GROWTH_TOL else "FAIL"
    return report
