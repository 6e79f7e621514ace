"""Linear and joint functional calculus, kernels, and weighted kernel norms.

On spectral fields a multiplier acts exactly, coefficient by coefficient.
Kernels are finite sums over the (frequency node, Hermite level) atoms of
the grid: for a symbol supported in [0, eta_max] the level sum truncates
exactly at (2k + d1)|lambda| <= eta_max, so the only discretization is
the declared frequency lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GriddedField, SpectralField
from .grid import Grid, GridError
from .hermite import multi_indices_upto, scaled_profile_matrix
from .reductions import pairwise_sum
from .symbols import Symbol1D, Symbol2D


class PaddingError(ValueError):
    """Sampled symbol does not vanish near the padded-box boundary."""


# ---------------------------------------------------------------------------
# exact calculus on spectral fields

def apply_linear_multiplier(F, f: SpectralField) -> SpectralField:
    """C_out(lambda, mu) = F((2|mu| + d1)|lambda|) C_in(lambda, mu); exact."""
    vals = np.asarray(F(f.eigenvalues))
    return f.copy_with(vals * f.coeffs)


def apply_joint_multiplier(F2, f: SpectralField) -> SpectralField:
    """Joint calculus of the operator pair: the second generator acts as
    multiplication by |lambda|, so C_out = F2(eigen, |lambda|) C_in."""
    tau = np.broadcast_to(f.lambda_abs[:, None], f.eigenvalues.shape)
    vals = np.asarray(F2(f.eigenvalues, tau))
    return f.copy_with(vals * f.coeffs)


# ---------------------------------------------------------------------------
# spectral atoms of a grid

@dataclass(frozen=True)
class SpectralAtoms:
    """Flattened (frequency node, Hermite level) pairs with
    (2k + d1)|lambda| <= eta_max."""

    grid: Grid
    eta_max: float
    lam: np.ndarray        # (Q, d2)
    lam_abs: np.ndarray    # (Q,)
    weight: np.ndarray     # (Q,)
    level: np.ndarray      # (Q,) integer k
    eigen: np.ndarray      # (Q,)
    lam_index: np.ndarray  # (Q,) node index into grid.lambda_points

    @property
    def count(self) -> int:
        return self.eigen.size


def build_atoms(grid: Grid, eta_max: float) -> SpectralAtoms:
    d1 = grid.dims.d1
    lam_min = grid.lambda_min_actual
    if d1 * lam_min > eta_max:
        raise GridError(
            f"lambda_min {lam_min:.4g} too large: no spectrum below "
            f"eta_max {eta_max:.4g} even at level 0")
    lam, lam_abs, w, lev, eig, idx = [], [], [], [], [], []
    for i in range(grid.n_lambda):
        a = grid.lambda_abs[i]
        kmax = int(np.floor((eta_max / a - d1) / 2.0 + 1e-12))
        for k in range(kmax + 1):
            lam.append(grid.lambda_points[i])
            lam_abs.append(a)
            w.append(grid.lambda_weights[i])
            lev.append(k)
            eig.append((2 * k + d1) * a)
            idx.append(i)
    return SpectralAtoms(grid=grid, eta_max=eta_max,
                         lam=np.array(lam), lam_abs=np.array(lam_abs),
                         weight=np.array(w), level=np.array(lev, dtype=int),
                         eigen=np.array(eig), lam_index=np.array(idx, dtype=int))


def level_max_for(symbol_hi: float, lam_min: float, d1: int) -> int:
    """Exact level truncation for symbols supported in [0, symbol_hi]."""
    return int(np.ceil((symbol_hi / lam_min - d1) / 2.0))


def atom_projection_values(atoms: SpectralAtoms, x1_point: np.ndarray,
                           y1_points: np.ndarray) -> np.ndarray:
    """R[q, i] = projection kernel at level k_q, frequency lambda_q,
    evaluated at (x1_point, y1_points[i])."""
    grid = atoms.grid
    d1 = grid.dims.d1
    y1 = np.atleast_2d(y1_points)
    out = np.empty((atoms.count, y1.shape[0]))
    q = 0
    while q < atoms.count:
        node = atoms.lam_index[q]
        q_end = q
        while q_end < atoms.count and atoms.lam_index[q_end] == node:
            q_end += 1
        kmax = int(atoms.level[q_end - 1])
        lam = atoms.lam[q]
        basis_y = scaled_profile_matrix(kmax, lam, y1)
        basis_x = scaled_profile_matrix(kmax, lam, np.atleast_2d(x1_point))
        mus = multi_indices_upto(d1, kmax)
        for qq in range(q, q_end):
            k = int(atoms.level[qq])
            rows = [k] if d1 == 1 else \
                [i for i, mu in enumerate(mus) if sum(mu) == k]
            out[qq] = basis_x[rows, 0] @ basis_y[rows, :]
        q = q_end
    return out


# ---------------------------------------------------------------------------
# kernels at points

def linear_kernel(F: Symbol1D, x, y, grid: Grid) -> complex:
    """Kernel of F applied through the calculus, evaluated at one point pair.

    x, y are (x1, x2) tuples of arrays.  Exact truncation: F vanishes
    beyond the grid's top atom level.
    """
    vals = linear_kernel_batch(F, [x], [y], grid)
    return complex(vals[0])


def linear_kernel_batch(F: Symbol1D, xs, ys, grid: Grid) -> np.ndarray:
    atoms = build_atoms(grid, F.support[1])
    sym = np.asarray(F(atoms.eigen))
    scale = (2.0 * np.pi) ** (-grid.dims.d2)
    out = np.empty(len(xs), dtype=complex)
    for i, (x, y) in enumerate(zip(xs, ys)):
        x1, x2 = np.atleast_1d(x[0]), np.atleast_1d(x[1])
        y1, y2 = np.atleast_1d(y[0]), np.atleast_1d(y[1])
        proj = atom_projection_values(atoms, x1, y1[None, :])[:, 0]
        phase = np.exp(1j * (atoms.lam @ (x2 - y2)))
        out[i] = scale * pairwise_sum(atoms.weight * sym * phase * proj)
    return out


def linear_kernel_on_grid(F: Symbol1D, x, grid: Grid) -> np.ndarray:
    """K(x, y) for every grid node y; shape (n_x1, n_x2)."""
    atoms = build_atoms(grid, F.support[1])
    x1, x2 = np.atleast_1d(x[0]), np.atleast_1d(x[1])
    coeff = (atoms.weight * np.asarray(F(atoms.eigen))
             * np.exp(1j * (atoms.lam @ x2))
             * (2.0 * np.pi) ** (-grid.dims.d2))
    proj = atom_projection_values(atoms, x1, grid.x1_points)   # (Q, n1)
    phase = np.exp(-1j * (atoms.lam @ grid.x2_points.T))       # (Q, n2)
    return (proj * coeff[:, None]).T @ phase


def bilinear_kernel(G: Symbol2D, x, y, z, grid: Grid) -> complex:
    return complex(bilinear_kernel_batch(G, [x], [y], [z], grid)[0])


def bilinear_kernel_batch(G: Symbol2D, xs, ys, zs, grid: Grid) -> np.ndarray:
    """Kernel of the bilinear operator at sample triples (vectorized)."""
    (a1, b1), (a2, b2) = G.support
    atoms1 = build_atoms(grid, b1)
    atoms2 = build_atoms(grid, b2)
    gmat = np.asarray(G(atoms1.eigen[:, None], atoms2.eigen[None, :]))
    scale = (2.0 * np.pi) ** (-2 * grid.dims.d2)
    out = np.empty(len(xs), dtype=complex)
    for i, (x, y, z) in enumerate(zip(xs, ys, zs)):
        x1, x2 = np.atleast_1d(x[0]), np.atleast_1d(x[1])
        a = (atoms1.weight
             * np.exp(1j * (atoms1.lam @ (x2 - np.atleast_1d(y[1]))))
             * atom_projection_values(atoms1, x1,
                                      np.atleast_1d(y[0])[None, :])[:, 0])
        b = (atoms2.weight
             * np.exp(1j * (atoms2.lam @ (x2 - np.atleast_1d(z[1]))))
             * atom_projection_values(atoms2, x1,
                                      np.atleast_1d(z[0])[None, :])[:, 0])
        out[i] = scale * (a @ gmat @ b)
    return out


# ---------------------------------------------------------------------------
# operators on gridded inputs (spectrum-limited, level-exact)

def apply_linear_multiplier_gridded(F: Symbol1D, h: GriddedField) -> GriddedField:
    """Apply F through the calculus to grid samples.

    Sections at each frequency node are projected onto the levels the
    symbol can see ((2k+d1)|lambda| <= sup supp F), multiplied, and
    resynthesized.  Exact in the level sum; quadrature only in x'.
    """
    grid = h.grid
    atoms = build_atoms(grid, F.support[1])
    phases = np.exp(-1j * grid.lambda_points @ grid.x2_points.T)
    sections = (phases * grid.x2_weights) @ h.values.T   # (n_lambda, n_x1)
    w1 = grid.x1_weights
    out_sections = np.zeros_like(sections)
    d1 = grid.dims.d1
    for i in range(grid.n_lambda):
        sel = atoms.lam_index == i
        if not sel.any():
            continue
        kmax = int(atoms.level[sel].max())
        lam = grid.lambda_points[i]
        basis = scaled_profile_matrix(kmax, lam, grid.x1_points)
        degs = np.array([sum(mu) for mu in multi_indices_upto(d1, kmax)])
        sym = np.asarray(F((2 * degs + d1) * grid.lambda_abs[i]))
        coeff = (basis * w1) @ sections[i]
        out_sections[i] = (sym * coeff) @ basis
    inv_phases = np.exp(1j * grid.x2_points @ grid.lambda_points.T)
    box = grid.x2_box_length ** grid.dims.d2
    values = (out_sections.T / box) @ inv_phases.T
    return GriddedField(grid=grid, values=values)


# ---------------------------------------------------------------------------
# weighted kernel norms (the probe left-hand sides)

def channel_values(grid: Grid, coeff: np.ndarray, atoms: SpectralAtoms,
                   x1_point: np.ndarray) -> np.ndarray:
    """K[y1, u] = sum_q coeff_q e^{i lambda_q u} Proj_q(x1, y1) over the grid.

    ``u`` runs over the periodic x''-node set (representing x'' - y'').
    """
    proj = atom_projection_values(atoms, x1_point, grid.x1_points)  # (Q, n1)
    phase = np.exp(1j * (atoms.lam @ grid.x2_points.T))             # (Q, n2)
    return (proj * coeff[:, None]).T @ phase


def weighted_channel_l2(grid: Grid, channel: np.ndarray, u_weight) -> float:
    """sum_{y1,u} w1 w2 u_weight(|u|) |K|^2 with wrapped |u|."""
    wu = np.asarray(u_weight(grid.wrapped_x2_abs()))
    inner = pairwise_sum((np.abs(channel) ** 2) * (wu * grid.x2_weights)[None, :],
                         axis=1)
    return float(pairwise_sum(grid.x1_weights * inner))


def linear_first_layer_weighted_l2(F: Symbol1D, y, grid: Grid,
                                   gamma: float) -> float:
    """Integral of |x'|^{2 gamma} |kernel(x, y)|^2 over the grid box in x.

    The x''-sum is exact on the lattice (block-diagonal across frequency
    nodes); the x'-integral is grid quadrature.
    """
    y1 = np.atleast_1d(y[0])
    atoms = build_atoms(grid, F.support[1])
    sym = np.asarray(F(atoms.eigen))
    proj = atom_projection_values(atoms, y1, grid.x1_points)  # (Q, n_x1)
    wx = grid.x1_weights * np.linalg.norm(grid.x1_points, axis=1) ** (2 * gamma)
    box = grid.x2_box_length ** grid.dims.d2
    scale = (2.0 * np.pi) ** (-2 * grid.dims.d2) * box
    total = 0.0
    for i in range(grid.n_lambda):
        sel = atoms.lam_index == i
        if not sel.any():
            continue
        v = (sym[sel] * atoms.weight[sel])[:, None] * proj[sel]
        s = np.abs(np.sum(v, axis=0)) ** 2
        total += float(np.sum(wx * s))
    return scale * total


def restriction_apply_l2(F: Symbol1D, h: GriddedField, gamma: float) -> float:
    """Weighted output norm || |x'|^gamma F(calculus) h ||_2 on the grid."""
    out = apply_linear_multiplier_gridded(F, h)
    wx = np.linalg.norm(h.grid.x1_points, axis=1) ** (2 * gamma)
    w = np.multiply.outer(wx * h.grid.x1_weights, h.grid.x2_weights)
    return float(np.sqrt(pairwise_sum((w * np.abs(out.values) ** 2).reshape(-1))))


def _power_cos_moments(p: float, k_max: int) -> np.ndarray:
    """W(p, k) = integral over [0, 1] of s^p cos(k pi s) ds, k = 0..k_max.

    Composite Gauss panels sized to the oscillation; the s^p kink at 0
    contributes one short panel whose absolute error is negligible for
    p >= 0.
    """
    panels = max(2 * k_max, 64)
    nodes, wts = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    rad = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + rad[:, None] * nodes[None, :]).reshape(-1)
    w = (rad[:, None] * wts[None, :]).reshape(-1)
    base = w * s ** p
    ks = np.arange(k_max + 1)
    return np.cos(np.pi * np.outer(ks, s)) @ base


def u_weight_table(grid: Grid, exponent: float, k_max: int) -> np.ndarray:
    """V(k) = integral of |u|^{2 exponent} e^{i k step u} over one period.

    Exact for exponent 0 (the lattice delta); for fractional exponents
    the closed moment integral avoids the aliasing a kinked weight
    suffers under the node-sum rule.
    """
    half = grid.x2_box_length / 2.0
    p = 2.0 * exponent
    mom = _power_cos_moments(p, k_max)
    return 2.0 * half ** (p + 1.0) * mom


def second_layer_channel_l2(profile: Symbol1D, grid: Grid, x1_point,
                            u_exponent: float, cutoff=None) -> float:
    """One channel of the second-layer weighted bounds:

    integral over (y', u) of |u|^{2 u_exponent} |K(y', u)|^2 where K is
    the kernel of profile (optionally times a frequency-size cutoff)
    applied through the calculus, frozen at base point x1.  The u
    integral is contracted per frequency difference against the exact
    weight moments.
    """
    atoms = build_atoms(grid, profile.support[1])
    coeff = np.asarray(profile(atoms.eigen), dtype=complex) * atoms.weight
    if cutoff is not None:
        coeff = coeff * np.asarray(cutoff(atoms.lam_abs))
    keep = np.abs(coeff) > 0
    if not keep.any():
        return 0.0
    sub = SpectralAtoms(grid=grid, eta_max=atoms.eta_max,
                        lam=atoms.lam[keep], lam_abs=atoms.lam_abs[keep],
                        weight=atoms.weight[keep], level=atoms.level[keep],
                        eigen=atoms.eigen[keep], lam_index=atoms.lam_index[keep])
    scale = (2.0 * np.pi) ** (-grid.dims.d2)
    c = scale * coeff[keep]
    proj = atom_projection_values(sub, np.atleast_1d(x1_point),
                                  grid.x1_points)          # (Q, n1)
    S = (proj * grid.x1_weights) @ proj.T
    steps = np.round(sub.lam / grid.lambda_step).astype(int)
    diffs = np.abs(steps[:, None, 0] - steps[None, :, 0]) \
        if grid.dims.d2 == 1 else None
    if diffs is None:
        raise NotImplementedError("second-layer channels are d2 = 1 only")
    vtab = u_weight_table(grid, u_exponent, int(diffs.max()))
    M = vtab[diffs] * S
    return float(np.real(np.conj(c) @ M @ c))


def bilinear_weighted_l2(G: Symbol2D, x, grid: Grid, exp1: float, exp2: float,
                         cutoff1=None, cutoff2=None) -> float:
    """General-G second-layer weighted norm via Gram contraction:

    integral over (y, z) of |x''-y''|^{2 exp1} |x''-z''|^{2 exp2}
    |bilinear kernel(x, y, z)|^2, with optional frequency-size cutoffs on
    each channel.
    """
    x1 = np.atleast_1d(x[0])
    (a1, b1), (a2, b2) = G.support
    atoms1 = build_atoms(grid, b1)
    atoms2 = build_atoms(grid, b2)
    g = np.asarray(G(atoms1.eigen[:, None], atoms2.eigen[None, :]),
                   dtype=complex)
    g = g * atoms1.weight[:, None] * atoms2.weight[None, :]
    if cutoff1 is not None:
        g = g * np.asarray(cutoff1(atoms1.lam_abs))[:, None]
    if cutoff2 is not None:
        g = g * np.asarray(cutoff2(atoms2.lam_abs))[None, :]

    if grid.dims.d2 != 1:
        raise NotImplementedError("weighted bilinear norms are d2 = 1 only")

    def gram(atoms, exponent):
        proj = atom_projection_values(atoms, x1, grid.x1_points)
        S = (proj * grid.x1_weights) @ proj.T
        steps = np.round(atoms.lam[:, 0] / grid.lambda_step).astype(int)
        diffs = np.abs(steps[:, None] - steps[None, :])
        vtab = u_weight_table(grid, exponent, int(diffs.max()))
        return vtab[diffs] * S

    M1 = gram(atoms1, exp1)
    M2 = gram(atoms2, exp2)
    scale = (2.0 * np.pi) ** (-4 * grid.dims.d2)
    X = M1.T @ g                     # contracts first index against conj pair
    total = np.sum((X @ M2) * np.conj(g))
    return scale * float(np.real(total))


# ---------------------------------------------------------------------------
# product Sobolev norm

def sobolev_product_norm(G: Symbol2D, s1: float, s2: float,
                         samples: int = 1024, pad: int = 4,
                         diagnostics: dict | None = None) -> float:
    """|| G ||_{L^2_{s1,s2}} by FFT on the zero-padded sample box.

    Raises PaddingError when the symbol carries mass on the outer frame
    of the padded box (i.e. the padding cannot isolate one period).
    """
    if s1 < 0 or s2 < 0:
        raise ValueError("Sobolev orders must be >= 0")
    (a1, b1), (a2, b2) = G.support
    n = samples
    big = pad * n
    h1 = (b1 - a1) / n
    h2 = (b2 - a2) / n
    e1 = a1 + (np.arange(big) + 0.5) * h1
    e2 = a2 + (np.arange(big) + 0.5) * h2
    vals = np.zeros((big, big), dtype=complex)
    vals[:n, :n] = G(e1[:n, None], e2[None, :n])

    # The padded frame must stay empty: mass on the outer rows/columns of
    # the padded array would mean the declared support leaks into the
    # periodic images of the transform.
    frame = max(2, big // 64)
    total_mass = float(np.sum(np.abs(vals) ** 2))
    edge = float(np.sum(np.abs(vals[big - frame:, :]) ** 2)
                 + np.sum(np.abs(vals[:big - frame, big - frame:]) ** 2))
    edge_frac = edge / total_mass if total_mass else 0.0
    if diagnostics is not None:
        diagnostics["edge_mass_fraction"] = edge_frac
    if edge_frac > 1e-10:
        raise PaddingError(
            f"boundary mass fraction {edge_frac:.2e} exceeds 1e-10; "
            "increase pad")

    spec = np.fft.fft2(vals) * (h1 * h2)
    xi1 = 2.0 * np.pi * np.fft.fftfreq(big, d=h1)
    xi2 = 2.0 * np.pi * np.fft.fftfreq(big, d=h2)
    w1 = (1.0 + xi1 ** 2) ** s1
    w2 = (1.0 + xi2 ** 2) ** s2
    weighted = (np.abs(spec) ** 2) * w1[:, None] * w2[None, :]
    total = float(np.sum(weighted)) * (xi1[1] - xi1[0]) * abs(xi2[1] - xi2[0]) \
        / (2.0 * np.pi) ** 2

    nyq = big // 2
    band = int(0.1 * nyq)
    sl = np.abs(np.arange(big) - nyq) < band
    boundary = float(np.sum(weighted[sl, :]) + np.sum(weighted[:, sl][~sl, :]))
    frac = boundary / total if total else 0.0
    if diagnostics is not None:
        diagnostics["nyquist_mass_fraction"] = frac
    if frac > 0.2:
        raise PaddingError(
            f"spectral mass fraction {frac:.2e} near the Nyquist band; "
            "increase samples")
    return float(np.sqrt(total))


def sobolev_norm_1d(g: Symbol1D, s: float, samples: int = 4096,
                    pad: int = 4) -> float:
    """1-D Sobolev norm (same Fourier-weight convention)."""
    lo, hi = g.support
    n = samples
    big = pad * n
    h = (hi - lo) / n
    e = lo + (np.arange(big) + 0.5) * h
    vals = np.zeros(big, dtype=complex)
    vals[:n] = g(e[:n])
    spec = np.fft.fft(vals) * h
    xi = 2.0 * np.pi * np.fft.fftfreq(big, d=h)
    total = float(np.sum(np.abs(spec) ** 2 * (1.0 + xi ** 2) ** s)
                  * abs(xi[1] - xi[0]) / (2.0 * np.pi))
    return float(np.sqrt(total))
