"""Student's t distribution from scratch: density, tails and critical values.

The cumulative distribution is evaluated through the regularized incomplete beta
function (continued-fraction expansion, modified Lentz). Critical values come from
a bracketed Newton iteration on the upper tail, so printed t tables are never needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import pandas as pd

from ..errors import DomainError, NumericalFailure
from ..utils.logging import get_logger

LOGGER = get_logger("services.tdist")

BETA_MAX_ITER = 300
BETA_TOL = 1e-14
_FPMIN = 1e-300

QUANTILE_MAX_ITER = 300
QUANTILE_INITIAL_UPPER = 1e6
QUANTILE_MAX_UPPER = 1e300

Interpretation = Literal["one-tail", "two-tail", "confidence-level"]

STANDARD_TAILS: Sequence[float] = (0.25, 0.10, 0.05, 0.025, 0.01, 0.005)


# ---------------------------------------------------------------------------
# Degrees of freedom and critical-value queries
# ---------------------------------------------------------------------------


def check_df(df) -> int:
    """Degrees of freedom are df = n - 1 for integer n, so only integers >= 1 pass."""

    if isinstance(df, bool) or not isinstance(df, (int, float)):
        raise DomainError(f"df must be an integer, got {df!r}")
    if isinstance(df, float):
        if not df.is_integer():
            raise DomainError(f"df must be an integer, got {df}")
        df = int(df)
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    return int(df)


@dataclass(frozen=True)
class TCriticalQuery:
    """Degrees of freedom plus a tail specification.

    ``value`` is read according to ``interpretation``: the upper-tail area itself
    (one-tail), the two-sided alpha (two-tail) or the confidence level c
    (confidence-level). All three resolve to an upper-tail probability q.
    """

    df: int
    value: float
    interpretation: Interpretation = "one-tail"

    def __post_init__(self) -> None:
        object.__setattr__(self, "df", check_df(self.df))
        if self.interpretation not in ("one-tail", "two-tail", "confidence-level"):
            raise DomainError(f"unknown tail interpretation {self.interpretation!r}")
        q = self.tail_probability
        if not 0.0 < q <= 0.5:
            raise DomainError(
                f"tail probability must lie in (0, 0.5], got {q} "
                f"from {self.interpretation}={self.value}"
            )

    @classmethod
    def one_tail(cls, df: int, q: float) -> "TCriticalQuery":
        return cls(df=df, value=q, interpretation="one-tail")

    @classmethod
    def two_tail(cls, df: int, alpha: float) -> "TCriticalQuery":
        return cls(df=df, value=alpha, interpretation="two-tail")

    @classmethod
    def confidence_level(cls, df: int, confidence: float) -> "TCriticalQuery":
        if not 0.0 <= confidence < 1.0:
            raise DomainError(f"confidence must lie in [0, 1), got {confidence}")
        return cls(df=df, value=confidence, interpretation="confidence-level")

    @property
    def tail_probability(self) -> float:
        if self.interpretation == "one-tail":
            return float(self.value)
        if self.interpretation == "two-tail":
            return float(self.value) / 2.0
        return (1.0 - float(self.value)) / 2.0


# ---------------------------------------------------------------------------
# Regularized incomplete beta
# ---------------------------------------------------------------------------


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""

    if not (a > 0 and b > 0) or math.isnan(a) or math.isnan(b):
        raise DomainError(f"incomplete beta needs a > 0 and b > 0, got a={a} b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta needs 0 <= x <= 1, got x={x}")
    return _incbeta(a, b, x, 1.0 - x)


def _incbeta(a: float, b: float, x: float, xc: float) -> float:
    """I_x(a, b) with the complement ``xc = 1 - x`` supplied exactly by the caller."""

    if x <= 0.0:
        return 0.0
    if xc <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(xc)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, xc) / b


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETA_TOL:
            return h
    raise NumericalFailure(
        f"incomplete beta continued fraction did not converge a={a} b={b} x={x} "
        f"after {BETA_MAX_ITER} iterations"
    )


# ---------------------------------------------------------------------------
# Distribution functions
# ---------------------------------------------------------------------------


def t_pdf(x: float, df: int) -> float:
    nu = float(check_df(df))
    log_norm = math.lgamma((nu + 1.0) / 2.0) - math.lgamma(nu / 2.0) - 0.5 * math.log(nu * math.pi)
    return math.exp(log_norm - (nu + 1.0) / 2.0 * math.log1p(x * x / nu))


def t_sf(x: float, df: int) -> float:
    """Upper-tail area P(T > x), evaluated without a 1 - cdf cancellation."""

    nu = float(check_df(df))
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    if x == 0.0:
        return 0.5
    x2 = x * x
    # P(|T| > |x|) = I_{nu/(nu+x^2)}(nu/2, 1/2); both arguments formed directly
    two_sided = _incbeta(nu / 2.0, 0.5, nu / (nu + x2), x2 / (nu + x2))
    half = 0.5 * two_sided
    return half if x > 0 else 1.0 - half


def t_cdf(x: float, df: int) -> float:
    if x == 0.0:
        check_df(df)
        return 0.5
    return 1.0 - t_sf(x, df) if x > 0 else t_sf(-x, df)


# ---------------------------------------------------------------------------
# Critical values
# ---------------------------------------------------------------------------


def t_quantile(query: TCriticalQuery) -> float:
    """Return t > 0 with upper-tail area equal to the query's tail probability."""

    df = query.df
    q = query.tail_probability
    if q == 0.5:
        return 0.0

    lo, hi = 0.0, QUANTILE_INITIAL_UPPER
    while t_sf(hi, df) > q:
        lo = hi
        hi *= 10.0
        if hi > QUANTILE_MAX_UPPER:
            raise NumericalFailure(f"could not bracket t quantile df={df} q={q}")

    t = 1.0 if lo < 1.0 < hi else 0.5 * (lo + hi)
    for iteration in range(1, QUANTILE_MAX_ITER + 1):
        excess = t_sf(t, df) - q
        if excess == 0.0:
            LOGGER.debug("tquantile_converged df=%s q=%s iterations=%s", df, q, iteration)
            return t
        if excess > 0:
            lo = t
        else:
            hi = t
        density = t_pdf(t, df)
        candidate = t + excess / density if density > 0 else math.nan
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        step = abs(candidate - t)
        t = candidate
        if step <= 1e-13 * max(1.0, t) or hi - lo <= 1e-13 * max(1.0, t):
            LOGGER.debug("tquantile_converged df=%s q=%s iterations=%s", df, q, iteration)
            return t
    raise NumericalFailure(
        f"t quantile did not converge df={df} q={q} after {QUANTILE_MAX_ITER} iterations"
    )


def critical_value(df: int, confidence: float) -> float:
    """Two-sided critical value t_{alpha/2} for a confidence level."""

    return t_quantile(TCriticalQuery.confidence_level(df, confidence))


def critical_value_table(
    dfs: Iterable[int] = range(1, 31),
    tail_probabilities: Sequence[float] = STANDARD_TAILS,
) -> pd.DataFrame:
    """Rows are degrees of freedom, columns one-tail probabilities."""

    dfs = list(dfs)
    rows = []
    for df in dfs:
        rows.append([t_quantile(TCriticalQuery.one_tail(df, q)) for q in tail_probabilities])
    frame = pd.DataFrame(rows, index=dfs, columns=list(tail_probabilities))
    frame.index.name = "df"
    return frame


__all__ = [
    "TCriticalQuery",
    "check_df",
    "regularized_incomplete_beta",
    "t_pdf",
    "t_sf",
    "t_cdf",
    "t_quantile",
    "critical_value",
    "critical_value_table",
    "STANDARD_TAILS",
]
