"""Hermite functions, their scaled variants, and spectral projections.

The one-dimensional Hermite functions are generated by the normalized
three-term recurrence

    h_{l+1}(t) = t*sqrt(2/(l+1))*h_l(t) - sqrt(l/(l+1))*h_{l-1}(t),

seeded with h_0(t) = pi^{-1/4} exp(-t^2/2).  Factorials never appear, so
the recurrence is stable to degree 512 and beyond.  An exponent carry
guards the Gaussian tail against underflow; tails below 1e-300 flush to
exactly zero.

Multi-indices mu with |mu| = k are enumerated in colexicographic order
(last component compared first), fixed so coefficient layouts are
reproducible across implementations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_PI_M14 = np.pi ** -0.25
_TAIL_FLUSH = 1e-300
_RESCALE_LIMIT = 1e280
_RESCALE_EXP = 512  # rescale by 2**±512 when magnitudes leave range


def hermite_all(max_l: int, t) -> np.ndarray:
    """Values h_l(t) for l = 0..max_l; shape (max_l+1,) + t.shape."""
    if max_l < 0:
        raise ValueError("max_l must be >= 0")
    t = np.asarray(t, dtype=float)
    shape = t.shape
    tf = t.reshape(-1)
    n = tf.size

    out = np.zeros((max_l + 1, n))
    # Carry h_l = v_l * 2**expo with v in a safe magnitude window.
    expo = np.zeros(n, dtype=np.int64)
    half_t2 = 0.5 * tf * tf
    # Seed in base-2 exponent form to survive exp(-t^2/2) underflow.
    e0 = -half_t2 / np.log(2.0)
    e_int = np.floor(e0).astype(np.int64)
    v_prev = _PI_M14 * np.exp2(e0 - e_int)
    expo += e_int
    out[0] = _emit(v_prev, expo)
    if max_l == 0:
        return out.reshape((1,) + shape)

    v_cur = tf * np.sqrt(2.0) * v_prev
    out[1] = _emit(v_cur, expo)
    for l in range(1, max_l):
        v_next = tf * np.sqrt(2.0 / (l + 1)) * v_cur - np.sqrt(l / (l + 1.0)) * v_prev
        v_prev, v_cur = v_cur, v_next
        big = np.abs(v_cur) > _RESCALE_LIMIT
        if big.any():
            v_cur[big] = np.ldexp(v_cur[big], -_RESCALE_EXP)
            v_prev[big] = np.ldexp(v_prev[big], -_RESCALE_EXP)
            expo[big] += _RESCALE_EXP
        out[l + 1] = _emit(v_cur, expo)
    return out.reshape((max_l + 1,) + shape)


def _emit(v, expo):
    h = np.ldexp(v, expo.astype(np.int32, copy=False))
    h[np.abs(h) < _TAIL_FLUSH] = 0.0
    return h


def hermite_eval(l: int, t):
    """The l-th Hermite function at t (scalar in, scalar out)."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    vals = hermite_all(l, np.asarray(t, dtype=float))[l]
    return vals if vals.shape else float(vals)


def hermite_derivative(l: int, t):
    """h_l'(t) from the ladder identity sqrt(l/2) h_{l-1} - sqrt((l+1)/2) h_{l+1}."""
    tab = hermite_all(l + 1, np.asarray(t, dtype=float))
    lower = tab[l - 1] if l >= 1 else 0.0
    return np.sqrt(l / 2.0) * lower - np.sqrt((l + 1) / 2.0) * tab[l + 1]


def hermite_second_derivative(l: int, t):
    """h_l''(t) via two ladder steps (exact, no finite differences)."""
    tab = hermite_all(l + 2, np.asarray(t, dtype=float))
    low = tab[l - 2] if l >= 2 else 0.0
    return (np.sqrt(l * (l - 1)) / 2.0 * low
            - (2 * l + 1) / 2.0 * tab[l]
            + np.sqrt((l + 1) * (l + 2)) / 2.0 * tab[l + 2])


@dataclass(frozen=True)
class HermiteTable:
    """Tabulated h_l over a quadrature grid, with trapezoid weights."""

    max_l: int
    nodes: np.ndarray
    values: np.ndarray  # shape (max_l+1, len(nodes))
    weights: np.ndarray

    def gram(self) -> np.ndarray:
        return (self.values * self.weights) @ self.values.T

    def recurrence_residual(self) -> float:
        """Largest relative defect of the three-term recurrence over the table."""
        t = self.nodes
        worst = 0.0
        for l in range(1, self.max_l):
            lhs = self.values[l + 1]
            rhs = (t * np.sqrt(2.0 / (l + 1)) * self.values[l]
                   - np.sqrt(l / (l + 1.0)) * self.values[l - 1])
            scale = np.max(np.abs(lhs)) or 1.0
            worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
        return worst


def build_hermite_table(max_l: int, extent: float | None = None,
                        count: int | None = None) -> HermiteTable:
    """Table over a uniform grid wide/fine enough for discrete orthonormality.

    Default extent covers the classical turning point sqrt(2*max_l+1)
    with margin; default spacing is 0.05.
    """
    if extent is None:
        extent = 1.6 * np.sqrt(2.0 * max_l + 1.0) + 4.0
    if count is None:
        count = int(np.ceil(2.0 * extent / 0.05)) | 1
    nodes = np.linspace(-extent, extent, count)
    h = nodes[1] - nodes[0]
    weights = np.full(count, h)
    weights[0] = weights[-1] = h / 2.0
    return HermiteTable(max_l=max_l, nodes=nodes, values=hermite_all(max_l, nodes),
                        weights=weights)


@lru_cache(maxsize=32)
def multi_indices(d1: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All mu in N^{d1} with |mu| = k, colexicographic (last component first)."""
    if d1 < 1 or k < 0:
        raise ValueError("need d1 >= 1, k >= 0")
    if d1 == 1:
        return ((k,),)
    out = []
    for last in range(k + 1):
        for head in multi_indices(d1 - 1, k - last):
            out.append(head + (last,))
    return tuple(out)


@lru_cache(maxsize=32)
def multi_indices_upto(d1: int, max_degree: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices with |mu| <= max_degree, by degree then colex within degree."""
    out = []
    for k in range(max_degree + 1):
        out.extend(multi_indices(d1, k))
    return tuple(out)


def _lambda_norm(lam) -> float:
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    norm = float(np.sqrt(np.sum(lam * lam)))
    if norm == 0.0:
        raise ValueError("lambda must be nonzero")
    return norm


def scaled_hermite_eval(mu, lam, x1) -> np.ndarray:
    """Scaled Hermite function |lam|^{d1/4} * prod_j h_{mu_j}(|lam|^{1/2} x1_j).

    ``x1`` may be a point of shape (d1,) or a batch (n, d1); returns the
    matching scalar/vector.
    """
    mu = tuple(np.atleast_1d(mu).astype(int))
    norm = _lambda_norm(lam)
    x1 = np.asarray(x1, dtype=float)
    squeeze = x1.ndim == 1
    pts = x1.reshape(-1, len(mu))
    root = np.sqrt(norm)
    val = norm ** (len(mu) / 4.0) * np.ones(pts.shape[0])
    for j, m in enumerate(mu):
        val = val * hermite_all(m, root * pts[:, j])[m]
    return float(val[0]) if (squeeze and pts.shape[0] == 1) else val


def scaled_profile_matrix(max_degree: int, lam, x1_nodes: np.ndarray) -> np.ndarray:
    """Matrix Phi[mu, x] of scaled Hermite functions over a 1-axis grid batch.

    ``x1_nodes`` has shape (n, d1); rows of the result follow
    ``multi_indices_upto(d1, max_degree)``.
    """
    norm = _lambda_norm(lam)
    pts = np.asarray(x1_nodes, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    d1 = pts.shape[1]
    root = np.sqrt(norm)
    tables = [hermite_all(max_degree, root * pts[:, j]) for j in range(d1)]
    mus = multi_indices_upto(d1, max_degree)
    out = np.empty((len(mus), pts.shape[0]))
    for i, mu in enumerate(mus):
        acc = tables[0][mu[0]].copy()
        for j in range(1, d1):
            acc *= tables[j][mu[j]]
        out[i] = acc
    return norm ** (d1 / 4.0) * out


def projection_kernel(k: int, lam, x1, y1):
    """Eigenspace kernel sum_{|mu|=k} Phi_mu^lam(x1) Phi_mu^lam(y1).

    ``x1``/``y1`` may be points (d1,) or aligned batches (n, d1);
    symmetric in (x1, y1).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    norm = _lambda_norm(lam)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    y1 = np.atleast_1d(np.asarray(y1, dtype=float))
    squeeze = x1.ndim == 1
    xs = x1.reshape(-1, x1.shape[-1]) if x1.ndim > 1 else x1.reshape(-1, x1.size)
    ys = y1.reshape(-1, y1.shape[-1]) if y1.ndim > 1 else y1.reshape(-1, y1.size)
    d1 = xs.shape[1]
    root = np.sqrt(norm)
    tx = [hermite_all(k, root * xs[:, j]) for j in range(d1)]
    ty = [hermite_all(k, root * ys[:, j]) for j in range(d1)]
    acc = np.zeros(xs.shape[0])
    for mu in multi_indices(d1, k):
        term = np.ones(xs.shape[0])
        for j, m in enumerate(mu):
            term = term * tx[j][m] * ty[j][m]
        acc += term
    acc *= norm ** (d1 / 2.0)
    return float(acc[0]) if (squeeze and acc.size == 1) else acc


def apply_projection(k: int, lam, profile, x1_nodes, x1_weights) -> np.ndarray:
    """Project an x'-profile (sampled on the grid) onto the |mu| = k eigenspace."""
    if k < 0:
        raise ValueError("k must be >= 0")
    basis = scaled_profile_matrix(k, lam, x1_nodes)
    mus = multi_indices_upto(x1_nodes.shape[1] if np.ndim(x1_nodes) > 1 else 1, k)
    rows = [i for i, mu in enumerate(mus) if sum(mu) == k]
    basis_k = basis[rows]
    coeffs = (basis_k * x1_weights) @ np.asarray(profile)
    return coeffs @ basis_k
