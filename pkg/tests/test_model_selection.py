import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsescreen.dataset import DataError, standardize
from sparsescreen.model_selection import CvConfig, CvCurve, assign_folds, cross_validate, select_lambda
from sparsescreen.solver import PenaltySpec, fit
from sparsescreen.synthlab import SynthSpec, generate


def test_balanced_folds_n10_k5():
    f = assign_folds(10, 5, seed=123)
    assert sorted(np.bincount(f.fold_of)) == [2] * 5


def test_fold_sizes_n47_k10():
    sizes = np.bincount(assign_folds(47, 10, seed=0).fold_of)
    assert sorted(sizes) == [4, 4, 4, 5, 5, 5, 5, 5, 5, 5]


def test_folds_deterministic():
    a = assign_folds(47, 10, seed=99)
    b = assign_folds(47, 10, seed=99)
    np.testing.assert_array_equal(a.fold_of, b.fold_of)
    assert not np.array_equal(a.fold_of, assign_folds(47, 10, seed=100).fold_of)


def test_folds_documented_generator():
    perm = np.random.Generator(np.random.PCG64(42)).permutation(12)
    expected = np.empty(12, dtype=int)
    expected[perm] = np.arange(12) % 4
    np.testing.assert_array_equal(assign_folds(12, 4, 42).fold_of, expected)


def test_leave_one_out():
    f = assign_folds(5, 5, seed=1)
    assert sorted(f.fold_of) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("k", [1, 11])
def test_fold_errors(k):
    with pytest.raises(ValueError):
        assign_folds(10, k, 0)


@given(st.integers(2, 60), st.data(), st.integers(0, 2**64 - 1))
def test_folds_partition(n, data, seed):
    k = data.draw(st.integers(2, n))
    f = assign_folds(n, k, seed)
    sizes = np.bincount(f.fold_of, minlength=k)
    assert sizes.sum() == n and sizes.min() >= 1
    assert sizes.max() - sizes.min() <= 1
    held = np.concatenate([f.held_out(i) for i in range(k)])
    assert sorted(held) == list(range(n))


def _curve(err, se=None, lambdas=(1.0, 0.5, 0.25)):
    err = np.asarray(err, dtype=float)
    return CvCurve(np.array(lambdas), err, np.zeros_like(err) if se is None else np.asarray(se, float))


def test_select_min_unique():
    assert select_lambda(_curve([3, 1, 2]), "min") == 0.5


def test_select_min_tie_goes_to_larger_lambda():
    assert select_lambda(_curve([2, 1, 1]), "min") == 0.5
    assert select_lambda(_curve([2, 1, 1 + 1e-14]), "min") == 0.5


def test_select_one_se():
    assert select_lambda(_curve([1.4, 1.0, 1.2], se=[0.1, 0.5, 0.1]), "one_se") == 1.0
    assert select_lambda(_curve([1.6, 1.0, 1.2], se=[0.1, 0.5, 0.1]), "one_se") == 0.5


def test_select_empty_and_bad_rule():
    with pytest.raises(ValueError):
        select_lambda(_curve([], lambdas=()), "min")
    with pytest.raises(ValueError):
        select_lambda(_curve([1, 2, 3]), "median")


def test_cv_noiseless_signal_picks_smallest_lambda():
    rng = np.random.Generator(np.random.PCG64(3))
    X = rng.standard_normal((47, 10))
    y = 2 * X[:, 0]
    curve = cross_validate(X, y, CvConfig(seed=3))
    assert curve.lambda_min == curve.lambdas[-1]
    i = int(np.flatnonzero(curve.lambdas == curve.lambda_min)[0])
    assert curve.mean_error[i] < 1e-3
    # the error at lambda_min is consistent with a direct refit's shrinkage
    c = fit(standardize(X), y, PenaltySpec(curve.lambda_min))
    assert abs(c.beta_raw[0] - 2) < 0.05


def test_cv_pure_noise_one_se_is_empty():
    inst = generate(SynthSpec(n=47, p=448, s=0, noise_sd=1.0, seed=5))
    curve = cross_validate(inst.X, inst.y, CvConfig(seed=5, rule="one_se"))
    c = fit(standardize(inst.X), inst.y, PenaltySpec(curve.lambda_1se))
    assert np.count_nonzero(c.beta_std) == 0


def test_cv_curve_structure_and_determinism():
    inst = generate(SynthSpec(n=47, p=60, s=3, seed=8))
    cfg = CvConfig(k=5, seed=11, n_lambda=40)
    a = cross_validate(inst.X, inst.y, cfg)
    b = cross_validate(inst.X, inst.y, cfg)
    assert len(a.lambdas) == len(a.mean_error) == len(a.std_error) == 40
    np.testing.assert_array_equal(a.mean_error, b.mean_error)
    assert a.lambda_1se >= a.lambda_min
    assert a.lambda_min in a.lambdas
    i_min = int(np.flatnonzero(a.lambdas == a.lambda_min)[0])
    i_1se = int(np.flatnonzero(a.lambdas == a.lambda_1se)[0])
    assert a.mean_error[i_1se] <= a.mean_error[i_min] + a.std_error[i_min] + 1e-12
    np.testing.assert_allclose(a.mean_error, a.fold_errors.mean(axis=0))
    np.testing.assert_allclose(a.std_error, a.fold_errors.std(axis=0, ddof=1) / np.sqrt(5))


def test_cv_lambda_path_comes_from_full_data():
    inst = generate(SynthSpec(n=30, p=20, s=2, seed=1))
    curve = cross_validate(inst.X, inst.y, CvConfig(k=3, n_lambda=10))
    d = standardize(inst.X)
    lm = np.max(np.abs(d.X_std.T @ (inst.y - inst.y.mean()))) / 30
    assert curve.lambdas[0] == pytest.approx(lm, rel=1e-12)


def test_cv_leave_one_out_runs():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((5, 3))
    y = X[:, 0] + 0.1 * rng.standard_normal(5)
    curve = cross_validate(X, y, CvConfig(k=5, n_lambda=5))
    assert curve.fold_errors.shape == (5, 5)


def test_cv_constant_fold_design_errors():
    X = np.zeros((6, 1))
    X[0, 0] = 1.0
    y = np.arange(6.0)
    # every fold without row 0 has a constant training column
    with pytest.raises(DataError, match="fold"):
        cross_validate(X, y, CvConfig(k=6, n_lambda=3))


def test_cv_config_validation():
    with pytest.raises(ValueError):
        CvConfig(k=1)
    with pytest.raises(ValueError):
        CvConfig(rule="median")
