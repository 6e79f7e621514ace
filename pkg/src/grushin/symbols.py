"""Multiplier symbols: truncated-power profiles, dyadic pieces, cutoffs.

All smooth bumps are pinned to one mollifier construction so results are
reproducible: the base bump on (1/2, 2) is

    b(t) = exp(-1/(t - 1/2) - 1/(2 - t)),

normalized by the (positive, dyadically periodic) sum D(t) =
sum_M b(2^M t), which enforces sum_M Theta(2^M t) = 1 for every t > 0
exactly by construction.  The plateau function used by the separated
path is 1 on [-1, 1] and 0 outside [-2, 2], built from the same
exp(-1/u) smooth step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dims import Dims


def _exp_inv(u):
    """exp(-1/u) for u > 0, 0 otherwise (smooth at 0)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u):
    """C^inf step: 0 for u <= 0, 1 for u >= 1."""
    a = _exp_inv(u)
    b = _exp_inv(1.0 - np.asarray(u, dtype=float))
    return np.divide(a, a + b, out=np.zeros_like(a), where=(a + b) > 0)


def mollifier_bump(t):
    """The base bump b(t) on (1/2, 2), zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.5) & (t < 2.0)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti - 0.5) - 1.0 / (2.0 - ti))
    return out


def dyadic_bump(t):
    """Normalized bump: Theta(t) = b(t) / sum_M b(2^M t); partition of
    unity over dyadic scales for t > 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    num = mollifier_bump(tp)
    den = np.zeros_like(tp)
    # Only scales with 2^M t in (1/2, 2) contribute: at most two integers M.
    m_lo = np.floor(-1.0 - np.log2(tp)).astype(int)
    for off in (0, 1, 2):
        den += mollifier_bump(np.ldexp(tp, (m_lo + off).astype(np.int32)))
    out[pos] = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return out


def plateau(t, inner: float = 1.0, outer: float = 2.0):
    """Smooth plateau: 1 on [-inner, inner], 0 outside [-outer, outer]."""
    t = np.abs(np.asarray(t, dtype=float))
    return 1.0 - smooth_step((t - inner) / (outer - inner))


def truncated_power(t, alpha: float):
    """(t)_+^alpha with the convention 0^alpha = 0 (also for alpha = 0)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = t[pos] ** alpha if alpha != 0 else 1.0
    return out


# ---------------------------------------------------------------------------
# symbol types

@dataclass
class Symbol1D:
    """A multiplier F(eta) with declared support interval."""

    evaluator: callable
    support: tuple[float, float]
    smoothness: str = "smooth"
    name: str = ""

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        lo, hi = self.support
        inside = (eta >= lo) & (eta <= hi)
        out = np.zeros(eta.shape, dtype=complex)
        if inside.any():
            out[inside] = self.evaluator(eta[inside])
        return out


@dataclass
class Symbol2D:
    """A bilinear multiplier G(eta1, eta2) with declared support box."""

    evaluator: callable
    support: tuple[tuple[float, float], tuple[float, float]]
    smoothness: str = "smooth"
    name: str = ""

    def __call__(self, eta1, eta2):
        eta1 = np.asarray(eta1, dtype=float)
        eta2 = np.asarray(eta2, dtype=float)
        (a1, b1), (a2, b2) = self.support
        inside = (eta1 >= a1) & (eta1 <= b1) & (eta2 >= a2) & (eta2 <= b2)
        out = np.zeros(np.broadcast(eta1, eta2).shape, dtype=complex)
        if inside.any():
            e1 = np.broadcast_to(eta1, out.shape)[inside]
            e2 = np.broadcast_to(eta2, out.shape)[inside]
            out[inside] = self.evaluator(e1, e2)
        return out

    def is_separable(self):
        return False


@dataclass
class DyadicCutoff:
    """The scale-M cutoff Theta_M(tau) = Theta(2^M tau)."""

    M: int
    base: callable = field(default=None)

    def __post_init__(self):
        if self.base is None:
            self.base = dyadic_bump

    def __call__(self, tau):
        return self.base(np.ldexp(np.asarray(tau, dtype=float), self.M))


def partition_defect(taus) -> float:
    """Max deviation of the truncated dyadic sum from 1 over given tau > 0."""
    taus = np.asarray(taus, dtype=float)
    total = np.zeros_like(taus)
    m_lo = np.floor(-1.0 - np.log2(taus)).astype(int)
    for off in (0, 1, 2):
        total += dyadic_bump(np.ldexp(taus, (m_lo + off).astype(np.int32)))
    return float(np.max(np.abs(total - 1.0)))


# ---------------------------------------------------------------------------
# concrete symbols

@dataclass(frozen=True)
class RieszParams:
    alpha: float
    R: float = 1.0
    dims: Dims = Dims(1, 1)

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.R <= 0:
            raise ValueError("R must be > 0")


@dataclass(frozen=True)
class DyadicPiece:
    """Dyadic localization of the truncated power near its vanishing set."""

    j: int
    alpha: float

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("j must be >= 0")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    @property
    def shell(self) -> tuple[float, float]:
        return (2.0 ** (-self.j - 1), 2.0 ** (-self.j + 1))


def riesz_symbol(params: RieszParams) -> Symbol2D:
    """(1 - (eta1 + eta2)/R)_+^alpha on the quadrant box [0, R]^2."""
    alpha, R = params.alpha, params.R

    def ev(e1, e2):
        return truncated_power(1.0 - (e1 + e2) / R, alpha)

    return Symbol2D(ev, ((0.0, R), (0.0, R)), name=f"riesz(alpha={alpha},R={R})")


def riesz_symbol_1d(alpha: float, R: float = 1.0) -> Symbol1D:
    return Symbol1D(lambda e: truncated_power(1.0 - e / R, alpha), (0.0, R),
                    name=f"riesz1(alpha={alpha},R={R})")


def dyadic_piece_profile(piece: DyadicPiece):
    """The 1-variable profile u_j(s) = s_+^alpha * phi(2^j s) of the piece,
    as a function of s = 1 - eta1 - eta2."""
    j, alpha = piece.j, piece.alpha

    def profile(s):
        return truncated_power(s, alpha) * dyadic_bump(np.ldexp(
            np.asarray(s, dtype=float), j))

    return profile


def dyadic_piece_symbol(piece: DyadicPiece) -> Symbol2D:
    """The dyadic piece as a 2-variable symbol restricted to [0, 1]^2."""
    profile = dyadic_piece_profile(piece)

    def ev(e1, e2):
        return profile(1.0 - e1 - e2)

    return Symbol2D(ev, ((0.0, 1.0), (0.0, 1.0)),
                    name=f"dyadic(j={piece.j},alpha={piece.alpha})")


def indicator_symbol_1d(lo: float = 0.0, hi: float = 1.0) -> Symbol1D:
    return Symbol1D(lambda e: np.ones_like(e), (lo, hi),
                    smoothness="indicator", name=f"indicator({lo},{hi})")


def gaussian_symbol_1d(center: float = 0.5, width: float = 0.15,
                       cut: float = 5.0) -> Symbol1D:
    lo, hi = center - cut * width, center + cut * width

    def ev(e):
        return np.exp(-0.5 * ((e - center) / width) ** 2)

    return Symbol1D(ev, (lo, hi), name=f"gaussian({center},{width})")


def bump_symbol_1d(lo: float, hi: float) -> Symbol1D:
    """Smooth bump compactly supported inside (lo, hi)."""
    mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def ev(e):
        u = (np.asarray(e, dtype=float) - mid) / rad
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out * np.e  # normalized to 1 at the center

    return Symbol1D(ev, (lo, hi), name=f"bump({lo},{hi})")


@dataclass
class SeparableSymbol2D(Symbol2D):
    """Tensor product of two 1-D symbols; keeps the factors accessible."""

    factor1: Symbol1D = None
    factor2: Symbol1D = None

    def is_separable(self):
        return True


def tensor_symbol(f1: Symbol1D, f2: Symbol1D) -> SeparableSymbol2D:
    return SeparableSymbol2D(
        evaluator=lambda e1, e2: f1(e1) * f2(e2),
        support=(f1.support, f2.support),
        name=f"tensor({f1.name},{f2.name})",
        factor1=f1, factor2=f2)


_BUILTIN_1D = {
    "riesz": lambda p: riesz_symbol_1d(float(p.get("alpha", 1.0)),
                                       float(p.get("R", 1.0))),
    "indicator": lambda p: indicator_symbol_1d(float(p.get("lo", 0.0)),
                                               float(p.get("hi", 1.0))),
    "gaussian": lambda p: gaussian_symbol_1d(float(p.get("center", 0.5)),
                                             float(p.get("width", 0.15))),
    "bump": lambda p: bump_symbol_1d(float(p.get("lo", 0.25)),
                                     float(p.get("hi", 0.75))),
}


def builtin_symbol_1d(name: str, **params) -> Symbol1D:
    if name not in _BUILTIN_1D:
        raise KeyError(f"unknown symbol {name!r}; available: "
                       f"{sorted(_BUILTIN_1D)}")
    return _BUILTIN_1D[name](params)


def builtin_symbol_2d(name: str, **params) -> Symbol2D:
    if name == "riesz":
        return riesz_symbol(RieszParams(float(params.get("alpha", 1.0)),
                                        float(params.get("R", 1.0))))
    if name == "dyadic":
        return dyadic_piece_symbol(DyadicPiece(int(params.get("j", 2)),
                                               float(params.get("alpha", 1.0))))
    if name == "tensor-bump":
        return tensor_symbol(bump_symbol_1d(float(params.get("lo", 0.25)),
                                            float(params.get("hi", 0.75))),
                             bump_symbol_1d(float(params.get("lo", 0.25)),
                                            float(params.get("hi", 0.75))))
    raise KeyError(f"unknown 2-D symbol {name!r}; available: "
                   "['riesz', 'dyadic', 'tensor-bump']")
