"""Simple regression of per-response selection counts on local factor."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence, Tuple

from .dataset import DataError

__all__ = [
    "CountFactorPairs",
    "RegressionSummary",
    "betainc_regularized",
    "t_two_sided_p",
    "regress_counts_on_factor",
    "extract_pairs",
]


@dataclass(frozen=True)
class CountFactorPairs:
    """(local_factor, n_nonzero, response_name) triples in report order."""

    pairs: Tuple[Tuple[int, int, str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        for factor, count, name in self.pairs:
            if not 1 <= factor <= 5:
                raise DataError(f"{name!r}: local factor {factor} outside 1..5")
            if count < 0:
                raise DataError(f"{name!r}: negative count {count}")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def factors(self) -> List[int]:
        return [p[0] for p in self.pairs]

    @property
    def counts(self) -> List[int]:
        return [p[1] for p in self.pairs]


@dataclass
class RegressionSummary:
    slope: float
    intercept: float
    r_squared: float
    slope_std_error: float
    t_stat: float
    p_value: float
    n: int
    per_factor_means: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_factor_means"] = {str(k): v for k, v in sorted(self.per_factor_means.items())}
        return d


_BETACF_EPS = 1e-16
_BETACF_TINY = 1e-300
_BETACF_MAXIT = 10_000


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for I_x(a, b), modified Lentz
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_TINY:
        d = _BETACF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _BETACF_TINY if abs(d) < _BETACF_TINY else d
        c = 1.0 + aa / c
        c = _BETACF_TINY if abs(c) < _BETACF_TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _BETACF_TINY if abs(d) < _BETACF_TINY else d
        c = 1.0 + aa / c
        c = _BETACF_TINY if abs(c) < _BETACF_TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _betainc(a: float, b: float, x: float, y: float) -> float:
    # y = 1 - x, supplied separately so callers can avoid cancellation
    if x == 0.0 or y == 0.0:
        return 0.0 if x == 0.0 else 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Continued-fraction evaluation, switching to ``1 - I_{1-x}(b, a)`` past
    the mean so the fraction converges quickly. Absolute accuracy is better
    than 1e-12 for the moderate shape parameters used by t tests.
    """
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must be in [0, 1]")
    return _betainc(a, b, x, 1.0 - x)


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return _betainc(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2))


def regress_counts_on_factor(pairs: CountFactorPairs) -> RegressionSummary:
    """Ordinary least squares of count on local factor with a two-sided t test.

    A zero-residual fit with zero slope is reported as ``p_value = 1``; a
    zero-residual fit with nonzero slope gives ``t = inf``, ``p_value = 0``.
    """
    n = len(pairs)
    if n < 3:
        raise DataError(f"need at least 3 pairs, got {n}")
    xs = [float(f) for f in pairs.factors]
    ys = [float(c) for c in pairs.counts]
    if len(set(xs)) < 2:
        raise DataError("all local factors are identical")

    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    syy = math.fsum((y - ybar) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    sse = math.fsum((y - intercept - slope * x) ** 2 for x, y in zip(xs, ys))
    # exact fits leave O(eps) rounding in sse
    if sse <= 1e-24 * max(syy, 1.0):
        sse = 0.0
    df = n - 2
    se = math.sqrt(sse / df / sxx)
    r_squared = 1.0 if syy == 0.0 else min(max(1.0 - sse / syy, 0.0), 1.0)

    if se == 0.0:
        if slope == 0.0:
            t_stat, p_value = 0.0, 1.0
        else:
            t_stat, p_value = math.copysign(math.inf, slope), 0.0
    else:
        t_stat = slope / se
        p_value = min(max(t_two_sided_p(t_stat, df), 0.0), 1.0)

    groups: Dict[int, List[float]] = {}
    for f, c in zip(pairs.factors, ys):
        groups.setdefault(int(f), []).append(c)
    means = {f: math.fsum(v) / len(v) for f, v in sorted(groups.items())}

    return RegressionSummary(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        slope_std_error=se,
        t_stat=t_stat,
        p_value=p_value,
        n=n,
        per_factor_means=means,
    )


def extract_pairs(report) -> CountFactorPairs:
    """Pull (local_factor, n_nonzero, name) out of a screening report."""
    results: Sequence = report.per_response
    if not results:
        raise DataError("report has no responses")
    pairs = []
    for res in results:
        if res.local_factor is None:
            raise DataError(f"response {res.response_name!r} has no local factor")
        pairs.append((int(res.local_factor), int(res.n_nonzero), res.response_name))
    return CountFactorPairs(tuple(pairs))
