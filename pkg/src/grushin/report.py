"""Regression-style probe reports: per-abscissa values plus a fitted line."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

#: Verdicts that count as success for aggregate pass/fail purposes.
PASSING_VERDICTS = ("PASS", "DEGENERATE-PASS", "NO-GUARANTEE")


def fit_line(abscissa, ordinate) -> tuple[float, float]:
    """Least-squares slope/intercept of ordinate on abscissa (slope 0 if n < 2)."""
    x = np.asarray(abscissa, dtype=float)
    y = np.asarray(ordinate, dtype=float)
    if x.size != y.size:
        raise ValueError("abscissa and ordinate lengths differ")
    if x.size == 0:
        return 0.0, 0.0
    if x.size == 1:
        return 0.0, float(y[0])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


@dataclass
class ProbeReport:
    """Output of a verifier probe.

    ``abscissa`` is typically the dyadic index j (or a cutoff index M),
    ``ordinate`` the log2 of the measured quantity.  ``slope`` and
    ``intercept`` are the least-squares fit of ordinate on abscissa and
    ``max_ratio`` carries the largest measured LHS/RHS ratio for
    bound-style probes.
    """

    abscissa: np.ndarray
    ordinate: np.ndarray
    slope: float
    intercept: float
    max_ratio: float = float("nan")
    verdict: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, abscissa, ordinate, max_ratio=float("nan"), **details):
        slope, intercept = fit_line(abscissa, ordinate)
        return cls(
            abscissa=np.asarray(abscissa, dtype=float),
            ordinate=np.asarray(ordinate, dtype=float),
            slope=slope,
            intercept=intercept,
            max_ratio=float(max_ratio),
            details=dict(details),
        )

    @property
    def passed(self) -> bool:
        return self.verdict in PASSING_VERDICTS

    def fitted(self) -> np.ndarray:
        return self.slope * self.abscissa + self.intercept

    def residual(self) -> np.ndarray:
        return self.ordinate - self.fitted()

    def to_csv(self, header_comments: list[str] | None = None) -> str:
        """Serialize as CSV: comment header, then abscissa/ordinate/fitted/residual rows."""
        buf = io.StringIO()
        for line in header_comments or []:
            buf.write(f"# {line}\n")
        buf.write(f"# verdict={self.verdict or 'NONE'}\n")
        buf.write(f"# slope={self.slope!r} intercept={self.intercept!r} "
                  f"max_ratio={self.max_ratio!r}\n")
        buf.write("abscissa,ordinate,fitted,residual\n")
        fit = self.fitted()
        res = self.residual()
        for i in range(self.abscissa.size):
            buf.write(f"{self.abscissa[i]!r},{self.ordinate[i]!r},"
                      f"{fit[i]!r},{res[i]!r}\n")
        return buf.getvalue()


def log2_safe(values, floor: float = 1e-300) -> np.ndarray:
    """log2 with a floor so exact zeros do not poison regression fits."""
    v = np.maximum(np.asarray(values, dtype=float), floor)
    return np.log2(v)
