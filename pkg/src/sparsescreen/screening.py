"""One cross-validated sparse fit per response, and selection-count tables."""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .dataset import AlignedDataset, standardize
from .model_selection import CvConfig, cross_validate
from .solver import Coefficients, PenaltySpec, check_kkt, fit, lambda_max

__all__ = [
    "ResponseResult",
    "ScreeningReport",
    "response_seed",
    "count_nonzero",
    "aggregate_predictor_counts",
    "screen_response",
    "screen_all",
]

_U64 = 2**64 - 1


@dataclass
class ResponseResult:
    response_name: str
    local_factor: Optional[int]
    lambda_selected: float
    rule_used: str
    n_nonzero: int
    selected: List[Tuple[str, float, float]]
    converged: bool
    intercept: float = 0.0
    kkt_max_violation: float = 0.0
    seed: int = 0
    note: str = ""

    def __post_init__(self) -> None:
        if self.n_nonzero != len(self.selected):
            raise ValueError("n_nonzero must equal the number of selected predictors")

    @property
    def selected_names(self) -> List[str]:
        return [name for name, _, _ in self.selected]


@dataclass
class ScreeningReport:
    per_response: List[ResponseResult]
    predictor_counts: Dict[str, int]
    config: Dict[str, object] = field(default_factory=dict)
    excluded_predictors: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def total_selected(self) -> int:
        return sum(r.n_nonzero for r in self.per_response)


def response_seed(seed: int, name: str) -> int:
    """Per-response CV seed: ``seed XOR h(name)``.

    ``h`` is the first 8 bytes (little endian) of the SHA-256 digest of the
    UTF-8 encoded name, so a response's folds do not depend on which other
    responses are screened alongside it.
    """
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return (seed ^ int.from_bytes(digest[:8], "little")) & _U64


def count_nonzero(c) -> int:
    """Number of exactly nonzero standardized coefficients (no intercept)."""
    beta = c.beta_std if isinstance(c, Coefficients) else c
    return int(np.count_nonzero(np.asarray(beta)))


def aggregate_predictor_counts(
    results: Iterable[ResponseResult], predictor_names: Optional[Iterable[str]] = None
) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    if predictor_names is not None:
        counts = {name: 0 for name in predictor_names}
    for res in results:
        for name in res.selected_names:
            counts[name] = counts.get(name, 0) + 1
    return counts


def screen_response(
    X: np.ndarray,
    y: np.ndarray,
    predictor_names,
    name: str,
    cfg: CvConfig,
    local_factor: Optional[int] = None,
) -> ResponseResult:
    """CV, penalty selection and full-data refit for a single response."""
    seed = response_seed(cfg.seed, name)
    design = standardize(X, predictor_names)
    y = np.asarray(y, dtype=float)
    if lambda_max(design, y - y.mean(), cfg.alpha) == 0.0:
        return ResponseResult(
            response_name=name,
            local_factor=local_factor,
            lambda_selected=0.0,
            rule_used=cfg.rule,
            n_nonzero=0,
            selected=[],
            converged=True,
            intercept=float(y.mean()),
            seed=seed,
            note="no predictor correlates with the response",
        )
    curve = cross_validate(X, y, replace(cfg, seed=seed))
    lam = curve.selected(cfg.rule)
    penalty = PenaltySpec(lam, cfg.alpha)
    coef = fit(design, y, penalty, config=cfg.convergence)
    kkt = check_kkt(design, y, coef, penalty)
    selected = []
    for jj in np.flatnonzero(coef.beta_std):
        j = design.retained[jj]
        selected.append((design.names[j], float(coef.beta_raw[j]), float(coef.beta_std[jj])))
    return ResponseResult(
        response_name=name,
        local_factor=local_factor,
        lambda_selected=float(lam),
        rule_used=cfg.rule,
        n_nonzero=count_nonzero(coef),
        selected=selected,
        converged=coef.converged,
        intercept=coef.intercept,
        kkt_max_violation=kkt.max_violation,
        seed=seed,
    )


def screen_all(
    data: AlignedDataset,
    cfg: CvConfig = CvConfig(),
    alpha: Optional[float] = None,
    parallelism: int = 1,
) -> ScreeningReport:
    """Screen every response of ``data`` against all predictors.

    ``alpha`` overrides ``cfg.alpha`` when given. Responses run on a thread
    pool of ``parallelism`` workers (the solver kernel releases the GIL);
    results are assembled in input order, so the report does not depend on
    scheduling.
    """
    if alpha is not None:
        cfg = replace(cfg, alpha=alpha)
    design = standardize(data.X, data.predictor_names)
    meta = data.metadata

    def run(j: int) -> ResponseResult:
        name = data.response_names[j]
        factor = meta[name] if meta is not None else None
        return screen_response(data.X, data.Y[:, j], data.predictor_names, name, cfg, factor)

    m = len(data.response_names)
    if parallelism <= 1:
        results = [run(j) for j in range(m)]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run, range(m)))

    counts = aggregate_predictor_counts(results, data.predictor_names)
    config = {
        "k": cfg.k,
        "seed": cfg.seed,
        "rule": cfg.rule,
        "alpha": cfg.alpha,
        "n_lambda": cfg.n_lambda,
        "eps_ratio": cfg.eps_ratio,
        "tol": cfg.convergence.tol,
        "max_sweeps": cfg.convergence.max_sweeps,
    }
    return ScreeningReport(
        per_response=results,
        predictor_counts=counts,
        config=config,
        excluded_predictors=list(design.excluded_columns),
    )
