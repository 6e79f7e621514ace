"""Field representations and the transforms between them.

A ``SpectralField`` is the computable dense-class object: finitely many
Hermite modes per frequency node, compactly supported on the frequency
grid.  A ``GriddedField`` holds complex samples on the spatial tensor
grid.  ``synthesize`` and ``analyze`` convert between the two; on the
lattice grids built by :mod:`grushin.grid` the round trip is exact up to
x'-quadrature error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dims import Dims
from .grid import Grid, GridError
from .hermite import multi_indices_upto, scaled_profile_matrix
from .reductions import pairwise_sum

FIELD_MAGIC = b"GRSH1"


class DegreeError(ValueError):
    """Requested Hermite degree exceeds what the grid resolves."""


@dataclass
class SpectralField:
    """Coefficients C(lambda, mu) over a compact frequency support.

    ``lambda_support`` has shape (n_supp, d2); ``coeffs`` has shape
    (n_supp, n_mu) with columns ordered like
    ``multi_indices_upto(d1, max_degree)``.
    """

    dims: Dims
    lambda_support: np.ndarray
    max_degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.lambda_support = np.atleast_2d(np.asarray(self.lambda_support,
                                                       dtype=float))
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        n_mu = len(multi_indices_upto(self.dims.d1, self.max_degree))
        if self.coeffs.shape != (self.lambda_support.shape[0], n_mu):
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} != "
                f"(n_supp, n_mu) = ({self.lambda_support.shape[0]}, {n_mu})")
        if np.any(np.sqrt(np.sum(self.lambda_support ** 2, axis=1)) == 0.0):
            raise ValueError("frequency support must avoid 0")

    @cached_property
    def lambda_abs(self) -> np.ndarray:
        return np.sqrt(np.sum(self.lambda_support ** 2, axis=1))

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Joint eigenvalues (2|mu| + d1)|lambda|, shape (n_supp, n_mu)."""
        degs = np.array([sum(mu) for mu in
                         multi_indices_upto(self.dims.d1, self.max_degree)])
        return np.outer(self.lambda_abs, 2 * degs + self.dims.d1)

    def copy_with(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.dims, self.lambda_support.copy(),
                             self.max_degree, coeffs)

    def coefficient_l2sq(self) -> float:
        return float(pairwise_sum(np.abs(self.coeffs.reshape(-1)) ** 2))


@dataclass
class GriddedField:
    """Complex samples over the tensor (x', x'') node set."""

    grid: Grid
    values: np.ndarray  # shape (n_x1, n_x2)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        want = (self.grid.n_x1, self.grid.n_x2)
        if self.values.shape != want:
            raise ValueError(f"values shape {self.values.shape} != {want}")


def _support_indices(f: SpectralField, grid: Grid) -> np.ndarray:
    try:
        return np.array([grid.lambda_index(lam) for lam in f.lambda_support])
    except GridError as e:
        raise GridError(f"field support not contained in grid nodes: {e}") from e


def _check_degree(f: SpectralField, grid: Grid):
    caps = [grid.resolvable_degree(v) for v in
            (float(f.lambda_abs.min()), float(f.lambda_abs.max()))]
    cap = min(caps)
    if f.max_degree > cap:
        raise DegreeError(
            f"degree {f.max_degree} unresolvable on support |lambda| in "
            f"[{f.lambda_abs.min():.4g}, {f.lambda_abs.max():.4g}] "
            f"(grid supports degree <= {cap})")


def profile_tensor(f: SpectralField, grid: Grid) -> np.ndarray:
    """Per-node x'-profiles P[i, x'] = sum_mu C(lambda_i, mu) Phi_mu^lambda(x')."""
    pts = grid.x1_points
    out = np.empty((f.lambda_support.shape[0], pts.shape[0]), dtype=complex)
    for i, lam in enumerate(f.lambda_support):
        basis = scaled_profile_matrix(f.max_degree, lam, pts)
        out[i] = f.coeffs[i] @ basis
    return out


def synthesize(f: SpectralField, grid: Grid) -> GriddedField:
    """Evaluate the field on the grid.

    values(x', x'') = (2 pi)^{-d2} sum_lambda w(lambda) e^{i lambda x''}
    sum_mu C(lambda, mu) Phi_mu^lambda(x').  The frequency sum is finite,
    so the only discretization is the declared node set itself.
    """
    idx = _support_indices(f, grid)
    _check_degree(f, grid)
    w = grid.lambda_weights[idx]
    profiles = profile_tensor(f, grid)                      # (n_supp, n_x1)
    phases = np.exp(1j * grid.x2_points @ f.lambda_support.T)  # (n_x2, n_supp)
    scale = (2.0 * np.pi) ** (-grid.dims.d2)
    values = (profiles.T * (scale * w)) @ phases.T          # (n_x1, n_x2)
    return GriddedField(grid=grid, values=values)


def analyze(h: GriddedField, max_degree: int,
            lambda_support: np.ndarray | None = None) -> SpectralField:
    """Extract coefficients C(lambda, mu) = <h^lambda, Phi_mu^lambda>.

    ``h^lambda`` is the discrete x''-Fourier transform of the samples at
    the requested frequency nodes (default: every grid node).  Raises
    DegreeError when the grid cannot resolve ``max_degree`` on the
    requested support.
    """
    grid = h.grid
    if lambda_support is None:
        lambda_support = grid.lambda_points
    lambda_support = np.atleast_2d(np.asarray(lambda_support, dtype=float))
    probe = SpectralField(grid.dims, lambda_support, 0,
                          np.zeros((lambda_support.shape[0], 1)))
    _support_indices(probe, grid)
    cap = min(grid.resolvable_degree(float(probe.lambda_abs.min())),
              grid.resolvable_degree(float(probe.lambda_abs.max())))
    if max_degree > cap:
        raise DegreeError(
            f"degree {max_degree} unresolvable on this support "
            f"(grid supports degree <= {cap})")

    # h^lambda(x') = sum_{x''} w2 h e^{-i lambda x''}; the synthesize
    # prefactor (2 pi)^{-d2} w(lambda) cancels against the box length, so
    # coefficients come out unscaled.
    phases = np.exp(-1j * lambda_support @ grid.x2_points.T)  # (n_supp, n_x2)
    idx = np.array([grid.lambda_index(lam) for lam in lambda_support])
    box = grid.x2_box_length ** grid.dims.d2
    norm = (2.0 * np.pi) ** grid.dims.d2 / (grid.lambda_weights[idx] * box)
    sections = (phases * grid.x2_weights) @ h.values.T       # (n_supp, n_x1)
    sections *= norm[:, None]

    n_mu = len(multi_indices_upto(grid.dims.d1, max_degree))
    coeffs = np.empty((lambda_support.shape[0], n_mu), dtype=complex)
    w1 = grid.x1_weights
    for i, lam in enumerate(lambda_support):
        basis = scaled_profile_matrix(max_degree, lam, grid.x1_points)
        coeffs[i] = (basis * w1) @ sections[i]
    return SpectralField(grid.dims, lambda_support, max_degree, coeffs)


# ---------------------------------------------------------------------------
# norms

def lp_norm(h: GriddedField, p: float) -> float:
    """(sum w(x) |h(x)|^p)^(1/p); max for p = inf.  Quasi-norms (p < 1) use
    the same formula."""
    if not (p > 0):
        raise ValueError(f"p must be positive or inf, got {p}")
    a = np.abs(h.values)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    w = np.multiply.outer(h.grid.x1_weights, h.grid.x2_weights)
    total = pairwise_sum((w * a ** p).reshape(-1))
    return float(total ** (1.0 / p))


def mixed_norm(h: GriddedField, p: float, q: float) -> float:
    """Inner p-norm over x'' then outer q-norm over x'."""
    if not (p > 0) or not (q > 0):
        raise ValueError(f"p, q must be positive or inf, got ({p}, {q})")
    a = np.abs(h.values)  # (n_x1, n_x2)
    if np.isinf(p):
        inner = a.max(axis=1, initial=0.0)
    else:
        inner = pairwise_sum((a ** p) * h.grid.x2_weights[None, :], axis=1) \
            ** (1.0 / p)
    if np.isinf(q):
        return float(inner.max(initial=0.0))
    outer = pairwise_sum(h.grid.x1_weights * inner ** q)
    return float(outer ** (1.0 / q))


# ---------------------------------------------------------------------------
# non-isotropic dilation

def dilate_spectral(f: SpectralField, t: float,
                    grid: Grid | None = None) -> SpectralField:
    """Coefficient-side dilation: support lambda -> t^2 lambda, C scaled by
    t^{-d1/2}.

    Chosen so that synthesize(dilate(f)) equals synthesize(f) sampled at
    (t x', t^2 x'') exactly on uniform-weight frequency lattices.  With a
    grid argument the mapped support is validated against the node set.
    """
    if t <= 0:
        raise ValueError("dilation ratio must be positive")
    new_support = (t * t) * f.lambda_support
    if grid is not None:
        for lam in new_support:
            if not grid.has_lambda(lam):
                raise GridError(
                    f"dilation by {t} maps support off the grid (at {lam})")
    scale = t ** (-f.dims.d1 / 2.0)
    return SpectralField(f.dims, new_support, f.max_degree, scale * f.coeffs)


def _sub_axis(nodes: np.ndarray, factor: float, tol: float) -> np.ndarray:
    """Indices i with factor*nodes[i] present in nodes."""
    keep = []
    for i, v in enumerate(nodes):
        target = factor * v
        j = int(np.argmin(np.abs(nodes - target)))
        if abs(nodes[j] - target) <= tol:
            keep.append((i, j))
    return np.array(keep, dtype=int).reshape(-1, 2)


def dilate_gridded(h: GriddedField, t: float) -> GriddedField:
    """Pointwise dilation (x', x'') -> values at (t x', t^2 x''), restricted
    to the sub-grid of nodes whose image is again a node."""
    if t <= 0:
        raise ValueError("dilation ratio must be positive")
    grid = h.grid
    tol1 = 1e-9 * max(1.0, abs(t)) * (grid.x1_axes[0][1] - grid.x1_axes[0][0])
    maps1 = [_sub_axis(ax, t, tol1) for ax in grid.x1_axes]
    tol2 = 1e-9 * max(1.0, t * t) * (grid.x2_axes[0][1] - grid.x2_axes[0][0])
    maps2 = [_sub_axis(ax, t * t, tol2) for ax in grid.x2_axes]
    if any(m.size == 0 for m in maps1 + maps2):
        raise GridError(f"dilation ratio {t} is inadmissible for this grid")

    from dataclasses import replace as _replace
    new_x1 = tuple(ax[m[:, 0]] for ax, m in zip(grid.x1_axes, maps1))
    new_x2 = tuple(ax[m[:, 0]] for ax, m in zip(grid.x2_axes, maps2))
    new_grid = _replace(
        grid,
        x1_axes=new_x1,
        x1_axis_weights=tuple(_requad(ax) for ax in new_x1),
        x2_axes=new_x2,
        x2_axis_weights=tuple(np.full(ax.size, ax[1] - ax[0]) if ax.size > 1
                              else np.ones(1) for ax in new_x2),
        lambda_axes=tuple((t * t) * ax for ax in grid.lambda_axes),
        lambda_axis_weights=tuple((t * t) * w for w in grid.lambda_axis_weights),
        lambda_step=(t * t) * grid.lambda_step,
    )
    shape = ([m.shape[0] for m in maps1] + [m.shape[0] for m in maps2])
    vals = h.values.reshape([ax.size for ax in grid.x1_axes]
                            + [ax.size for ax in grid.x2_axes])
    for axis, m in enumerate(maps1 + maps2):
        vals = np.take(vals, m[:, 1], axis=axis)
    vals = vals.reshape(int(np.prod(shape[:grid.dims.d1])), -1)
    # Grid caches (cached_property) belong to the old instance; the
    # replace() above created a fresh one.
    return GriddedField(grid=new_grid, values=vals)


def _requad(nodes: np.ndarray) -> np.ndarray:
    if nodes.size == 1:
        return np.ones(1)
    h = nodes[1] - nodes[0]
    w = np.full(nodes.size, h)
    w[0] = w[-1] = h / 2.0
    return w


def dilate(f, t: float, grid: Grid | None = None):
    """Dispatch on field kind; see dilate_spectral / dilate_gridded."""
    if isinstance(f, SpectralField):
        return dilate_spectral(f, t, grid)
    if isinstance(f, GriddedField):
        return dilate_gridded(f, t)
    raise TypeError(f"cannot dilate {type(f).__name__}")


# ---------------------------------------------------------------------------
# serialization

def write_field_binary(h: GriddedField, path: str):
    """Little-endian: magic GRSH1, int32 d1, d2, per-axis counts, then
    row-major complex64 pairs."""
    counts = [ax.size for ax in h.grid.x1_axes] + [ax.size for ax in h.grid.x2_axes]
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(struct.pack("<2i", h.grid.dims.d1, h.grid.dims.d2))
        fh.write(struct.pack(f"<{len(counts)}i", *counts))
        fh.write(np.ascontiguousarray(h.values.astype(np.complex64)).tobytes())


def read_field_binary(path: str, grid: Grid) -> GriddedField:
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != FIELD_MAGIC:
            raise ValueError(f"bad magic {magic!r}; expected {FIELD_MAGIC!r}")
        d1, d2 = struct.unpack("<2i", fh.read(8))
        if (d1, d2) != (grid.dims.d1, grid.dims.d2):
            raise ValueError(f"dims mismatch: file ({d1},{d2}) vs grid "
                             f"({grid.dims.d1},{grid.dims.d2})")
        counts = struct.unpack(f"<{d1 + d2}i", fh.read(4 * (d1 + d2)))
        want = tuple(ax.size for ax in grid.x1_axes + grid.x2_axes)
        if counts != want:
            raise ValueError(f"axis counts mismatch: file {counts} vs grid {want}")
        raw = np.frombuffer(fh.read(), dtype=np.complex64)
    n1 = int(np.prod(counts[:d1]))
    n2 = int(np.prod(counts[d1:]))
    return GriddedField(grid=grid, values=raw.reshape(n1, n2).astype(complex))


def write_field_csv(h: GriddedField, path: str, comments: list[str] | None = None):
    """One node per row: x' coordinates, x'' coordinates, re, im."""
    grid = h.grid
    with open(path, "w") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        d1, d2 = grid.dims.d1, grid.dims.d2
        cols = [f"x1_{j}" for j in range(d1)] + [f"x2_{j}" for j in range(d2)]
        fh.write(",".join(cols + ["re", "im"]) + "\n")
        for i in range(grid.n_x1):
            for j in range(grid.n_x2):
                coords = list(grid.x1_points[i]) + list(grid.x2_points[j])
                v = h.values[i, j]
                fh.write(",".join(repr(c) for c in coords)
                         + f",{v.real!r},{v.imag!r}\n")
