"""Synthetic HDLSS instances and brute-force reference solvers.

Nothing here imports from :mod:`sparsescreen.solver`; the oracles evaluate
the penalized objective themselves so that agreement with the coordinate
descent solver is evidence rather than a tautology.

Generator (numpy ``PCG64(seed)``, draws in this order):

1. ``X = rng.standard_normal((n, p))``
2. ``support = sorted(rng.choice(p, size=s, replace=False))``
3. ``signs = rng.choice([-1.0, 1.0], size=s)``
4. ``noise = rng.standard_normal(n)``

and ``y = X @ beta + noise_sd * noise`` with ``beta[support] = signs * beta_magnitude``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "SynthSpec",
    "SynthInstance",
    "generate",
    "generate_responses",
    "ols_oracle",
    "penalized_objective",
    "lasso_grid_oracle",
]


@dataclass(frozen=True)
class SynthSpec:
    n: int = 47
    p: int = 448
    s: int = 5
    beta_magnitude: float = 3.0
    noise_sd: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0 <= self.s <= self.p:
            raise ValueError("need 0 <= s <= p")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


@dataclass
class SynthInstance:
    X: np.ndarray
    y: np.ndarray
    true_beta: np.ndarray
    true_support: np.ndarray
    spec: SynthSpec


def _draw_response(rng, X, s, magnitude, noise_sd):
    n, p = X.shape
    support = np.sort(rng.choice(p, size=s, replace=False))
    signs = rng.choice([-1.0, 1.0], size=s)
    beta = np.zeros(p)
    beta[support] = signs * magnitude
    noise = rng.standard_normal(n)
    y = X @ beta
    if noise_sd > 0:
        y = y + noise_sd * noise
    return y, beta, support


def generate(spec: SynthSpec) -> SynthInstance:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    X = rng.standard_normal((spec.n, spec.p))
    y, beta, support = _draw_response(rng, X, spec.s, spec.beta_magnitude, spec.noise_sd)
    return SynthInstance(X=X, y=y, true_beta=beta, true_support=support, spec=spec)


def generate_responses(spec: SynthSpec, m: int, n_null: int = 0):
    """Several responses on one shared design.

    The first ``m`` responses have ``spec.s`` true predictors each, the
    following ``n_null`` are pure noise. Response ``j`` draws from its own
    stream ``PCG64([spec.seed, j + 1])`` so adding responses leaves earlier
    ones untouched.

    Returns ``(X, Y, betas)`` with ``Y`` of shape ``(n, m + n_null)``.
    """
    X = generate(spec).X
    columns, betas = [], []
    for j in range(m + n_null):
        rng = np.random.Generator(np.random.PCG64([spec.seed, j + 1]))
        s = spec.s if j < m else 0
        y, beta, _ = _draw_response(rng, X, s, spec.beta_magnitude, spec.noise_sd)
        columns.append(y)
        betas.append(beta)
    return X, np.column_stack(columns), np.array(betas)


def ols_oracle(X, y) -> np.ndarray:
    """Least squares through the normal equations (no intercept)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n < p or np.linalg.matrix_rank(X) < p:
        raise np.linalg.LinAlgError("design is rank deficient")
    return np.linalg.solve(X.T @ X, X.T @ y)


def penalized_objective(X, y, beta, lam: float, alpha: float = 1.0) -> float:
    X = np.asarray(X, dtype=float)
    resid = np.asarray(y, dtype=float) - X @ beta
    n = X.shape[0]
    pen = alpha * np.abs(beta).sum() + 0.5 * (1 - alpha) * np.dot(beta, beta)
    return float(0.5 * np.dot(resid, resid) / n + lam * pen)


def _grid_objective(H, c, c0, B, lam, alpha):
    # B: (G, p) candidate coefficients; 0.5 b'Hb - c'b + c0 + penalty
    quad = 0.5 * np.einsum("gi,gi->g", B @ H, B) - B @ c + c0
    pen = alpha * np.abs(B).sum(axis=1) + 0.5 * (1 - alpha) * np.einsum("gi,gi->g", B, B)
    return quad + lam * pen


def lasso_grid_oracle(
    X,
    y,
    lam: float,
    alpha: float = 1.0,
    points: Optional[int] = None,
    rounds: int = 3,
    final_step: float = 1e-4,
) -> np.ndarray:
    """Minimize the penalized objective by coarse-to-fine grid search (p <= 3).

    ``X`` and ``y`` are used as given; pass a standardized design and centered
    response to match the solver. The search box is the sublevel set bound
    ``||b|| <= 2 ||y|| / sigma_min(X)``. Grids are lattices of integer
    multiples of their step, so exact zeros are always representable; each
    refinement shrinks the step by ``(points - 1) / 6`` around the incumbent.
    The step count per round is raised until the final step is at most
    ``final_step``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if p > 3:
        raise ValueError("grid oracle supports p <= 3")
    H = X.T @ X / n
    c = X.T @ y / n
    c0 = 0.5 * np.dot(y, y) / n

    smin = np.linalg.svd(X, compute_uv=False).min()
    radius = 2.0 * np.linalg.norm(y) / smin if smin > 0 else 0.0
    radius = max(radius, 1.0)
    if points is None:
        points = {1: 2001, 2: 241, 3: 61}[p]

    # half-width in steps; a multiple of 3 keeps every refined lattice a
    # superset of the coarser one's points
    half = max(3, 3 * round((points - 1) / 6))
    while True:
        shrink = half // 3
        step = radius / half
        if step / shrink**rounds <= final_step:
            break
        half += 3

    center = np.zeros(p)
    offsets = np.arange(-half, half + 1)
    for r in range(rounds + 1):
        axes = [center[i] + step * offsets for i in range(p)]
        B = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        vals = _grid_objective(H, c, c0, B, lam, alpha)
        center = B[int(np.argmin(vals))]
        # snap exact zeros that picked up rounding in center + step*offset
        center[np.abs(center) < 0.5 * step] = 0.0
        if r < rounds:
            step = step / shrink
    return center
