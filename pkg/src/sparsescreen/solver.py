"""Elastic-net / LASSO by cyclic coordinate descent.

Objective, on a :class:`~sparsescreen.dataset.StandardizedDesign`::

    (1/2n) ||y_c - X b||^2 + lam * (alpha * ||b||_1 + (1 - alpha)/2 * ||b||^2)

with ``y_c`` the centered response. The intercept is not penalized; it is
recovered from the means. Because every standardized column has
``x.T @ x == n`` the coordinate minimizer is a single soft-threshold.
Zeros produced by the threshold are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .dataset import DataError, StandardizedDesign

__all__ = [
    "PenaltySpec",
    "ConvergenceConfig",
    "Coefficients",
    "PathResult",
    "KKTReport",
    "soft_threshold",
    "lambda_max",
    "objective",
    "fit",
    "fit_path",
    "lambda_sequence",
    "check_kkt",
]


@dataclass(frozen=True)
class PenaltySpec:
    lam: float
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class ConvergenceConfig:
    tol: float = 1e-7
    max_sweeps: int = 100_000

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass
class Coefficients:
    """A fitted coefficient vector.

    ``beta_std`` lives on the standardized scale (one entry per retained
    column), ``beta_raw`` on the original scale (one entry per input column,
    excluded columns at 0). ``intercept`` is on the raw scale, so
    ``predict(X) = intercept + X @ beta_raw``; it equals ``mean(y)`` whenever
    every coefficient is zero.
    """

    intercept: float
    beta_std: np.ndarray
    beta_raw: np.ndarray
    sweeps_used: int = 0
    converged: bool = True

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta_std != 0.0)

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        return self.intercept + np.asarray(X_raw, dtype=float) @ self.beta_raw


@dataclass
class PathResult:
    lambdas: np.ndarray
    coefficients_per_lambda: List[Coefficients]
    nonzero_counts: np.ndarray
    alpha: float = 1.0

    @property
    def converged(self) -> bool:
        return all(c.converged for c in self.coefficients_per_lambda)


@dataclass
class KKTReport:
    max_violation: float
    offending: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def ok(self) -> bool:
        return self.offending.size == 0


def soft_threshold(z: float, gamma: float) -> float:
    """sign(z) * max(|z| - gamma, 0)."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if abs(z) <= gamma:
        return 0.0
    return z - gamma if z > 0 else z + gamma


@numba.njit(cache=True, nogil=True)
def _sweep(XT, r, beta, idx, n_idx, l1, denom, inv_n):
    # one cyclic pass over idx[:n_idx]; returns the max |change|
    n = XT.shape[1]
    dmax = 0.0
    for t in range(n_idx):
        j = idx[t]
        old = beta[j]
        xj = XT[j]
        acc = 0.0
        for i in range(n):
            acc += xj[i] * r[i]
        z = acc * inv_n + old
        if z > l1:
            new = (z - l1) / denom
        elif z < -l1:
            new = (z + l1) / denom
        else:
            new = 0.0
        if new != old:
            delta = new - old
            for i in range(n):
                r[i] -= xj[i] * delta
            beta[j] = new
            if abs(delta) > dmax:
                dmax = abs(delta)
    return dmax


@numba.njit(cache=True, nogil=True)
def _coordinate_descent(XT, r, beta, l1, denom, tol, max_sweeps):
    p, n = XT.shape
    inv_n = 1.0 / n
    all_idx = np.arange(p)
    active = np.empty(p, dtype=np.int64)
    sweeps = 0
    while sweeps < max_sweeps:
        dmax = _sweep(XT, r, beta, all_idx, p, l1, denom, inv_n)
        sweeps += 1
        if dmax < tol:
            return sweeps, True
        # iterate on the current nonzero set until it settles, then
        # go back to a full pass to check for new entrants
        n_active = 0
        for j in range(p):
            if beta[j] != 0.0:
                active[n_active] = j
                n_active += 1
        while sweeps < max_sweeps:
            dmax = _sweep(XT, r, beta, active, n_active, l1, denom, inv_n)
            sweeps += 1
            if dmax < tol:
                break
    return sweeps, False


def _centered(design: StandardizedDesign, y) -> tuple:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != design.n:
        raise DataError(f"response length {y.shape} does not match design rows {design.n}")
    y_mean = float(y.mean())
    return y - y_mean, y_mean


def lambda_max(design: StandardizedDesign, y_centered, alpha: float = 1.0) -> float:
    """Smallest penalty at which the all-zero coefficient vector is optimal."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    if design.p == 0:
        raise DataError("empty design")
    y_centered = np.asarray(y_centered, dtype=float)
    return float(np.max(np.abs(design.X_std.T @ y_centered)) / (design.n * alpha))


def objective(design: StandardizedDesign, y, beta_std, penalty: PenaltySpec) -> float:
    y_c, _ = _centered(design, y)
    resid = y_c - design.X_std @ beta_std
    a = penalty.alpha
    pen = a * np.sum(np.abs(beta_std)) + 0.5 * (1 - a) * np.dot(beta_std, beta_std)
    return float(0.5 * np.dot(resid, resid) / design.n + penalty.lam * pen)


def _package(design, beta_std, y_mean, sweeps, converged) -> Coefficients:
    beta_raw = np.zeros(design.n_features_in)
    beta_raw[design.retained] = beta_std / design.scales
    intercept = y_mean - float(np.dot(design.means, beta_std / design.scales))
    return Coefficients(
        intercept=intercept,
        beta_std=beta_std,
        beta_raw=beta_raw,
        sweeps_used=int(sweeps),
        converged=bool(converged),
    )


def fit(
    design: StandardizedDesign,
    y,
    penalty: PenaltySpec,
    init: Optional[Coefficients] = None,
    config: ConvergenceConfig = ConvergenceConfig(),
    *,
    _XT: Optional[np.ndarray] = None,
) -> Coefficients:
    """Minimize the penalized objective at one penalty.

    Non-convergence is not an exception: the last iterate is returned with
    ``converged=False``.
    """
    y_c, y_mean = _centered(design, y)
    p = design.p
    if penalty.lam >= lambda_max(design, y_c, penalty.alpha):
        return _package(design, np.zeros(p), y_mean, 0, True)

    if init is None:
        beta = np.zeros(p)
    else:
        beta = np.array(init.beta_std, dtype=float)
        if beta.shape != (p,):
            raise DataError(f"initial coefficients have shape {beta.shape}, expected ({p},)")
    XT = _XT if _XT is not None else np.ascontiguousarray(design.X_std.T)
    r = y_c - design.X_std @ beta
    l1 = penalty.lam * penalty.alpha
    denom = 1.0 + penalty.lam * (1.0 - penalty.alpha)
    sweeps, converged = _coordinate_descent(
        XT, r, beta, l1, denom, config.tol, config.max_sweeps
    )
    return _package(design, beta, y_mean, sweeps, converged)


def lambda_sequence(lam_max: float, n_lambda: int = 100, eps_ratio: float = 0.01) -> np.ndarray:
    """Log-spaced penalties from ``lam_max`` down to ``eps_ratio * lam_max``."""
    if n_lambda < 2:
        raise ValueError("n_lambda must be >= 2")
    if not 0 < eps_ratio < 1:
        raise ValueError("eps_ratio must be in (0, 1)")
    if not lam_max > 0:
        raise DataError("lambda_max is zero: the response is constant or uncorrelated with every predictor")
    lambdas = lam_max * np.exp(np.linspace(0.0, np.log(eps_ratio), n_lambda))
    lambdas[0] = lam_max
    return lambdas


def fit_path(
    design: StandardizedDesign,
    y,
    alpha: float = 1.0,
    n_lambda: int = 100,
    eps_ratio: float = 0.01,
    config: ConvergenceConfig = ConvergenceConfig(),
    lambdas: Optional[np.ndarray] = None,
) -> PathResult:
    """Warm-started fits along a decreasing penalty sequence.

    By default the sequence is built from this design's own ``lambda_max``;
    cross-validation passes the full-data sequence explicitly.
    """
    y_c, _ = _centered(design, y)
    if lambdas is None:
        lambdas = lambda_sequence(lambda_max(design, y_c, alpha), n_lambda, eps_ratio)
    else:
        lambdas = np.asarray(lambdas, dtype=float)
    XT = np.ascontiguousarray(design.X_std.T)
    coefs = []
    prev = None
    for lam in lambdas:
        c = fit(design, y, PenaltySpec(float(lam), alpha), init=prev, config=config, _XT=XT)
        coefs.append(c)
        prev = c
    counts = np.array([np.count_nonzero(c.beta_std) for c in coefs], dtype=np.int64)
    return PathResult(lambdas=lambdas, coefficients_per_lambda=coefs, nonzero_counts=counts, alpha=alpha)


def check_kkt(
    design: StandardizedDesign,
    y,
    coefficients,
    penalty: PenaltySpec,
    kkt_tol: float = 1e-6,
) -> KKTReport:
    """Stationarity check of the penalized objective.

    With ``g = X.T (y_c - X b) / n``: zero entries need ``|g_j| <= lam*alpha``,
    nonzero entries need ``g_j = lam*alpha*sign(b_j) + lam*(1-alpha)*b_j``.
    """
    beta = coefficients.beta_std if isinstance(coefficients, Coefficients) else coefficients
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (design.p,):
        raise DataError(f"coefficients have shape {beta.shape}, expected ({design.p},)")
    y_c, _ = _centered(design, y)
    g = design.X_std.T @ (y_c - design.X_std @ beta) / design.n
    l1 = penalty.lam * penalty.alpha
    l2 = penalty.lam * (1.0 - penalty.alpha)
    nz = beta != 0.0
    viol = np.where(
        nz,
        np.abs(g - l1 * np.sign(beta) - l2 * beta),
        np.maximum(np.abs(g) - l1, 0.0),
    )
    max_v = float(viol.max()) if viol.size else 0.0
    return KKTReport(max_violation=max_v, offending=np.flatnonzero(viol > kkt_tol))
