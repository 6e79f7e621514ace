"""Tensor grids for the two-layer space and the punctured frequency lattice.

The x''-axis and the frequency nodes are built together: nodes are placed
on the lattice ``step * {a, ..., b}`` (both signs, zero excluded) with
``step = 2*pi / x2_extent``, so complex exponentials at distinct nodes
are exactly orthogonal under the grid quadrature.  This makes the
discrete Plancherel identity exact up to x'-quadrature error, which is
what every spectral-side test in this package relies on.

Because of that coupling the constructor treats ``x2_extent`` and
``x2_count`` as hints: the extent is re-derived from the frequency
window (largest step that divides lambda_min into the lattice) and the
count is raised to meet the Nyquist limit.  Resolved values are recorded
on the grid and in run manifests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .dims import Dims

GRID_KEYS = ("d1", "d2", "x1_extent", "x1_count", "x2_extent", "x2_count",
             "lambda_min", "lambda_max", "lambda_count")


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Flat key-value grid description (the external config format)."""

    d1: int = 1
    d2: int = 1
    x1_extent: float = 16.0
    x1_count: int = 64
    x2_extent: float = 16.0
    x2_count: int = 64
    lambda_min: float = 1.0 / 16.0
    lambda_max: float = 4.0
    lambda_count: int = 32

    def to_text(self) -> str:
        return "".join(f"{k}={getattr(self, k)!r}\n" for k in GRID_KEYS)

    @classmethod
    def from_mapping(cls, mapping) -> "GridSpec":
        kwargs = {}
        for key in GRID_KEYS:
            if key in mapping:
                raw = mapping[key]
                kwargs[key] = (int(raw) if key in ("d1", "d2", "x1_count",
                                                   "x2_count", "lambda_count")
                               else float(raw))
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "GridSpec":
        return cls.from_mapping(parse_flat_config(text))


def parse_flat_config(text: str) -> dict:
    """Parse ``key=value`` lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise GridError(f"line {lineno}: expected key=value, got {body!r}")
        key, val = body.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def format_flat_config(mapping: dict) -> str:
    return "".join(f"{k}={mapping[k]}\n" for k in sorted(mapping))


def _uniform_axis(extent: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Zero-anchored lattice on [-extent/2, extent/2) with trapezoid weights."""
    h = extent / count
    nodes = (np.arange(count) - count // 2) * h
    weights = np.full(count, h)
    weights[0] = weights[-1] = h / 2.0
    return nodes, weights


def _periodic_axis(extent: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Zero-anchored lattice with the periodic (uniform-weight) rule."""
    h = extent / count
    nodes = (np.arange(count) - count // 2) * h
    return nodes, np.full(count, h)


@dataclass(frozen=True)
class Grid:
    """Discretization: x'-axes, x''-axes, and the punctured frequency nodes."""

    dims: Dims
    x1_axes: tuple[np.ndarray, ...]
    x1_axis_weights: tuple[np.ndarray, ...]
    x2_axes: tuple[np.ndarray, ...]
    x2_axis_weights: tuple[np.ndarray, ...]
    lambda_axes: tuple[np.ndarray, ...]
    lambda_axis_weights: tuple[np.ndarray, ...]
    lambda_step: float
    spec: GridSpec          # as requested
    resolved: GridSpec      # after extent/count adjustment

    # -- flattened tensor views -------------------------------------------
    @cached_property
    def x1_points(self) -> np.ndarray:
        return _tensor_points(self.x1_axes)

    @cached_property
    def x1_weights(self) -> np.ndarray:
        return _tensor_weights(self.x1_axis_weights)

    @cached_property
    def x2_points(self) -> np.ndarray:
        return _tensor_points(self.x2_axes)

    @cached_property
    def x2_weights(self) -> np.ndarray:
        return _tensor_weights(self.x2_axis_weights)

    @cached_property
    def lambda_points(self) -> np.ndarray:
        return _tensor_points(self.lambda_axes)

    @cached_property
    def lambda_weights(self) -> np.ndarray:
        return _tensor_weights(self.lambda_axis_weights)

    @cached_property
    def lambda_abs(self) -> np.ndarray:
        return np.sqrt(np.sum(self.lambda_points ** 2, axis=1))

    @property
    def n_x1(self) -> int:
        return int(np.prod([a.size for a in self.x1_axes]))

    @property
    def n_x2(self) -> int:
        return int(np.prod([a.size for a in self.x2_axes]))

    @property
    def n_lambda(self) -> int:
        return self.lambda_points.shape[0]

    @property
    def x2_box_length(self) -> float:
        return float(self.resolved.x2_extent)

    @property
    def lambda_min_actual(self) -> float:
        return float(min(np.abs(ax).min() for ax in self.lambda_axes))

    # -- lookups ------------------------------------------------------------
    def lambda_index(self, lam, tol: float = 1e-9) -> int:
        """Index of a frequency vector among the grid nodes (error if absent)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        diff = np.max(np.abs(self.lambda_points - lam[None, :]), axis=1)
        i = int(np.argmin(diff))
        if diff[i] > tol * max(1.0, self.lambda_step):
            raise GridError(f"frequency {lam} is not a grid node")
        return i

    def has_lambda(self, lam, tol: float = 1e-9) -> bool:
        try:
            self.lambda_index(lam, tol)
            return True
        except GridError:
            return False

    def resolvable_degree(self, lam_abs: float) -> int:
        """Largest Hermite degree the x'-grid resolves at frequency size lam_abs.

        Extent rule: half-extent > 1.5*sqrt(2l+d1)/sqrt(lam) (the scaled
        Hermite function of degree l lives in |u| <~ sqrt(2l+d1)).
        Spacing rule: at least 3 grid points per oscillation wavelength,
        i.e. 2l+d1 <= (2*pi / (3*h*sqrt(lam)))**2.
        """
        half = 0.5 * self.resolved.x1_extent
        h = self.resolved.x1_extent / self.resolved.x1_count
        root = math.sqrt(lam_abs)
        cap_extent = (half * root / 1.5) ** 2 - self.dims.d1
        cap_spacing = (2.0 * math.pi / (3.0 * h * root)) ** 2 - self.dims.d1
        return max(-1, int(math.floor(min(cap_extent, cap_spacing) / 2.0)))

    def wrapped_x2_abs(self) -> np.ndarray:
        """|u| on the periodic x''-box, wrapped into [0, L/2]; shape (n_x2,)."""
        L = self.x2_box_length
        u = self.x2_points
        w = np.abs((u + L / 2.0) % L - L / 2.0)
        return np.sqrt(np.sum(w * w, axis=1))


def _tensor_points(axes) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


def _tensor_weights(axis_weights) -> np.ndarray:
    w = axis_weights[0]
    for nxt in axis_weights[1:]:
        w = np.multiply.outer(w, nxt)
    return w.reshape(-1)


def make_grid(dims: Dims, spec: GridSpec) -> Grid:
    """Build a grid; deterministic function of the spec.

    Raises GridError on non-positive counts/extents, lambda_min <= 0, or a
    frequency window the lattice cannot host.
    """
    if spec.d1 != dims.d1 or spec.d2 != dims.d2:
        spec = replace(spec, d1=dims.d1, d2=dims.d2)
    if spec.x1_count < 2 or spec.x2_count < 2 or spec.lambda_count < 1:
        raise GridError("node counts must be positive (x counts >= 2)")
    if spec.x1_extent <= 0 or spec.x2_extent <= 0:
        raise GridError("extents must be positive")
    if spec.lambda_min <= 0:
        raise GridError("lambda_min must be > 0 (the frequency box is punctured)")
    if spec.lambda_max < spec.lambda_min:
        raise GridError("lambda_max must be >= lambda_min")

    # Lattice step: largest divisor of lambda_min compatible with the
    # requested node count over [lambda_min, lambda_max].
    m = spec.lambda_count
    if m > 1:
        a_est = spec.lambda_min * (m - 1) / max(spec.lambda_max - spec.lambda_min,
                                                1e-300)
        a = max(1, int(round(a_est)))
    else:
        a = 1
    step = spec.lambda_min / a
    b = int(math.floor(spec.lambda_max / step + 1e-9))
    if b - a + 1 < m:
        raise GridError(
            f"cannot place {m} lattice nodes in [{spec.lambda_min}, "
            f"{spec.lambda_max}] with step {step}")
    idx = np.unique(np.round(np.linspace(a, b, m)).astype(int))
    if idx.size != m:
        raise GridError("frequency node collision; reduce lambda_count")
    pos = idx * step

    x2_extent = 2.0 * math.pi / step
    lam_top = pos[-1]
    n2 = spec.x2_count
    # Nyquist: need pi * n2 / extent > lam_top strictly.
    min_n2 = int(math.ceil(x2_extent * lam_top / math.pi)) + 1
    while n2 < min_n2:
        n2 *= 2
    h1 = spec.x1_extent / spec.x1_count
    if h1 > 0.5 / math.sqrt(lam_top) + 1e-12:
        raise GridError(
            f"x1 spacing {h1:.4g} too coarse for lambda_max {lam_top:.4g}; "
            f"the rule requires h <= 0.5/sqrt(lambda_max)")

    x1 = [_uniform_axis(spec.x1_extent, spec.x1_count) for _ in range(dims.d1)]
    x2 = [_periodic_axis(x2_extent, n2) for _ in range(dims.d2)]
    lam_axis = np.concatenate([-pos[::-1], pos])
    lam_w = np.full(lam_axis.size, step)
    resolved = replace(spec, x2_extent=x2_extent, x2_count=n2,
                       lambda_min=float(pos[0]), lambda_max=float(lam_top))
    return Grid(
        dims=dims,
        x1_axes=tuple(ax for ax, _ in x1),
        x1_axis_weights=tuple(w for _, w in x1),
        x2_axes=tuple(ax for ax, _ in x2),
        x2_axis_weights=tuple(w for _, w in x2),
        lambda_axes=tuple(lam_axis.copy() for _ in range(dims.d2)),
        lambda_axis_weights=tuple(lam_w.copy() for _ in range(dims.d2)),
        lambda_step=step,
        spec=spec,
        resolved=resolved,
    )


def default_grid_spec() -> GridSpec:
    return GridSpec()


def make_default_grid() -> Grid:
    return make_grid(Dims(1, 1), default_grid_spec())
