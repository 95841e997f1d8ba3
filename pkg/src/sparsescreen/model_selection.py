"""K-fold cross-validation of the penalty along a shared lambda path."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import DataError, standardize
from .solver import ConvergenceConfig, fit_path, lambda_max, lambda_sequence

__all__ = [
    "FoldAssignment",
    "CvConfig",
    "CvCurve",
    "assign_folds",
    "cross_validate",
    "select_lambda",
    "RULES",
]

RULES = ("min", "one_se")
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    k: int
    seed: int

    def held_out(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def training(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


@dataclass(frozen=True)
class CvConfig:
    k: int = 10
    seed: int = 0
    rule: str = "min"
    n_lambda: int = 100
    eps_ratio: float = 0.01
    alpha: float = 1.0
    convergence: ConvergenceConfig = field(default_factory=ConvergenceConfig)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class CvCurve:
    lambdas: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray
    lambda_min: float = float("nan")
    lambda_1se: float = float("nan")
    fold_errors: Optional[np.ndarray] = None

    def selected(self, rule: str) -> float:
        return self.lambda_min if rule == "min" else self.lambda_1se


def assign_folds(n: int, k: int, seed: int = 0) -> FoldAssignment:
    """Seeded balanced fold assignment.

    A permutation of ``0..n-1`` is drawn with numpy's PCG64 bit generator
    (``np.random.Generator(np.random.PCG64(seed)).permutation(n)``) and dealt
    round-robin: the i-th permuted index goes to fold ``i % k``.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows n={n}")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[perm] = np.arange(n) % k
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed)


def _argmin_largest_lambda(lambdas, mean_error) -> int:
    best = np.min(mean_error)
    ties = np.flatnonzero(mean_error <= best + _TIE_RTOL * abs(best))
    return int(ties[np.argmax(lambdas[ties])])


def select_lambda(curve: CvCurve, rule: str = "min") -> float:
    """``min``: largest lambda at the minimum error. ``one_se``: largest lambda
    whose error is within one standard error of that minimum."""
    lambdas = np.asarray(curve.lambdas, dtype=float)
    err = np.asarray(curve.mean_error, dtype=float)
    if lambdas.size == 0:
        raise ValueError("empty CV curve")
    i_min = _argmin_largest_lambda(lambdas, err)
    if rule == "min":
        return float(lambdas[i_min])
    if rule == "one_se":
        threshold = err[i_min] + np.asarray(curve.std_error, dtype=float)[i_min]
        ok = np.flatnonzero(err <= threshold)
        return float(lambdas[ok[np.argmax(lambdas[ok])]])
    raise ValueError(f"unknown rule {rule!r}")


def cross_validate(X_raw, y, cfg: CvConfig = CvConfig()) -> CvCurve:
    """K-fold CV error along the full-data lambda path.

    Each training fold is re-standardized on its own rows; predictions for the
    held-out rows use the raw-scale coefficients, so errors are in response
    units.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X_raw.shape[0]
    if y.shape != (n,):
        raise DataError(f"response length {y.shape} does not match {n} rows")
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of rows n={n}")

    full = standardize(X_raw)
    lam_max = lambda_max(full, y - y.mean(), cfg.alpha)
    lambdas = lambda_sequence(lam_max, cfg.n_lambda, cfg.eps_ratio)

    folds = assign_folds(n, cfg.k, cfg.seed)
    fold_errors = np.empty((cfg.k, lambdas.size))
    for f in range(cfg.k):
        train, test = folds.training(f), folds.held_out(f)
        try:
            design = standardize(X_raw[train])
        except DataError as exc:
            raise DataError(f"fold {f}: {exc}") from None
        path = fit_path(
            design, y[train], alpha=cfg.alpha, config=cfg.convergence, lambdas=lambdas
        )
        X_test, y_test = X_raw[test], y[test]
        for l, coef in enumerate(path.coefficients_per_lambda):
            resid = y_test - coef.predict(X_test)
            fold_errors[f, l] = np.mean(resid**2)

    curve = CvCurve(
        lambdas=lambdas,
        mean_error=fold_errors.mean(axis=0),
        std_error=fold_errors.std(axis=0, ddof=1) / np.sqrt(cfg.k),
        fold_errors=fold_errors,
    )
    curve.lambda_min = select_lambda(curve, "min")
    curve.lambda_1se = select_lambda(curve, "one_se")
    return curve
