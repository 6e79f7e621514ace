"""Smoothness-threshold tables over the (1/p1, 1/p2) square.

Each sufficiency item of the boundedness results is encoded as a
region predicate plus a threshold formula in the inverse exponents; a
query returns the minimum threshold over all applicable items.  The
(infinity, infinity) corner is not literally covered by any item and its
value is sourced from the endpoint analysis instead; that sourcing is
recorded on the verdict.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .dims import Dims

REGIONS = ("I", "II", "III_a", "III_b", "IV_a", "IV_b", "V", "NotCovered")
VARIANTS = ("general", "restricted")

_EPS = 1e-12


def _le(a, b):
    return a <= b + _EPS


def _lt(a, b):
    return a < b - _EPS


@dataclass(frozen=True)
class RegionVerdict:
    region: str
    threshold: float | None
    variant: str
    source: str = "item"

    def __post_init__(self):
        if self.region not in REGIONS:
            raise ValueError(f"unknown region {self.region!r}")
        if (self.threshold is None) != (self.region == "NotCovered"):
            raise ValueError("threshold present iff covered")
        if self.threshold is not None and self.threshold < -_EPS:
            raise ValueError("thresholds are non-negative")


def _general_items(dims: Dims):
    d = dims.total_dim
    q = dims.homogeneous_dim
    dk = dims.threshold_dim
    return [
        # u = 1/p1, v = 1/p2, w = 1/p = u + v
        ("I", lambda u, v, w: 0 < u <= 0.5 + _EPS and 0 < v <= 0.5 + _EPS
         and _le(0.5, w) and _le(w, 1.0),
         lambda u, v, w: (d - 1) * (1.0 - w)),
        ("II", lambda u, v, w: 0 < u <= 0.5 + _EPS and 0 < v <= 0.5 + _EPS
         and 0 < w <= 0.5 + _EPS,
         lambda u, v, w: (d - 1) / 2.0 + d * (0.5 - w)),
        ("III_a", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.0, v) and _le(v, 0.5) and _le(0.5, w) and _le(w, 1.0),
         lambda u, v, w: q * (u - 0.5) + (d - 1) * (1.0 - w)),
        ("III_b", lambda u, v, w: _le(0.5, v) and _le(v, 1.0)
         and _le(0.0, u) and _le(u, 0.5) and _le(0.5, w) and _le(w, 1.0),
         lambda u, v, w: q * (v - 0.5) + (d - 1) * (1.0 - w)),
        ("IV_a", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.0, v) and _le(v, 0.5) and _le(1.0, w),
         lambda u, v, w: dk * (w - 1.0) + q * (0.5 - v)),
        ("IV_b", lambda u, v, w: _le(0.5, v) and _le(v, 1.0)
         and _le(0.0, u) and _le(u, 0.5) and _le(1.0, w),
         lambda u, v, w: dk * (w - 1.0) + q * (0.5 - u)),
        ("V", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.5, v) and _le(v, 1.0),
         lambda u, v, w: dk * (w - 1.0)),
    ]


def _restricted_items(dims: Dims):
    d = dims.total_dim
    return [
        ("III_a", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.0, v) and _le(v, 0.5) and _le(0.5, w) and _le(w, 1.0),
         lambda u, v, w: d * (0.5 - v) - (1.0 - w)),
        ("III_b", lambda u, v, w: _le(0.5, v) and _le(v, 1.0)
         and _le(0.0, u) and _le(u, 0.5) and _le(0.5, w) and _le(w, 1.0),
         lambda u, v, w: d * (0.5 - u) - (1.0 - w)),
        ("IV_a", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.0, v) and _le(v, 0.5) and _le(1.0, w),
         lambda u, v, w: d * (u - 0.5)),
        ("IV_b", lambda u, v, w: _le(0.5, v) and _le(v, 1.0)
         and _le(0.0, u) and _le(u, 0.5) and _le(1.0, w),
         lambda u, v, w: d * (v - 0.5)),
        ("V", lambda u, v, w: _le(0.5, u) and _le(u, 1.0)
         and _le(0.5, v) and _le(v, 1.0),
         lambda u, v, w: d * (w - 1.0)),
    ]


def threshold(p1: float, p2: float, dims: Dims,
              variant: str = "general") -> RegionVerdict:
    """Classify (p1, p2) and return the minimal applicable threshold.

    Exponents live in [1, inf].  The restricted variant assumes the
    frequency-support restriction on the inputs and draws on both item
    sets (the support hypothesis only helps).
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    for p in (p1, p2):
        if not (p >= 1.0):
            raise ValueError(f"exponents must lie in [1, inf], got {p}")
    u = 0.0 if math.isinf(p1) else 1.0 / p1
    v = 0.0 if math.isinf(p2) else 1.0 / p2
    w = u + v

    items = list(_general_items(dims))
    if variant == "restricted":
        items += _restricted_items(dims)
    hits = [(fml(u, v, w), name) for name, cond, fml in items if cond(u, v, w)]
    if hits:
        best, region = min(hits, key=lambda t: (t[0], t[1]))
        return RegionVerdict(region=region, threshold=float(best),
                             variant=variant)
    if u < _EPS and v < _EPS:
        # The joint-sup corner: the endpoint estimate gives d - 1/2
        # (the limit of the region-II formula), proved separately.
        d = dims.total_dim
        return RegionVerdict(region="II", threshold=float(d - 0.5),
                             variant=variant, source="endpoint")
    return RegionVerdict(region="NotCovered", threshold=None, variant=variant)


def threshold_table(dims: Dims, variant: str = "general",
                    resolution: int = 20) -> str:
    """CSV rows over the inverse-exponent lattice with spacing 1/resolution.

    Header: inv_p1,inv_p2,region,alpha,variant.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    buf = io.StringIO()
    buf.write("inv_p1,inv_p2,region,alpha,variant\n")
    for i in range(resolution + 1):
        for j in range(resolution + 1):
            u = i / resolution
            v = j / resolution
            p1 = math.inf if u == 0 else 1.0 / u
            p2 = math.inf if v == 0 else 1.0 / v
            verdict = threshold(p1, p2, dims, variant)
            alpha = "" if verdict.threshold is None else repr(verdict.threshold)
            buf.write(f"{u!r},{v!r},{verdict.region},{alpha},{variant}\n")
    return buf.getvalue()


def figure_corners(dims: Dims, variant: str = "general") -> dict:
    """The nine labeled lattice nodes (u, v) in {0, 1/2, 1}^2 -> threshold."""
    out = {}
    for ui in (0.0, 0.5, 1.0):
        for vi in (0.0, 0.5, 1.0):
            p1 = math.inf if ui == 0 else 1.0 / ui
            p2 = math.inf if vi == 0 else 1.0 / vi
            out[(ui, vi)] = threshold(p1, p2, dims, variant).threshold
    return out
