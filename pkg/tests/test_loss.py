import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.errors import DomainError, EmptyInputError, NonDifferentiableError, ShapeMismatchError
from app.heatmap.models import Heatmap
from app.loss.alpha import estimate_alpha, estimate_alpha_sweep
from app.loss.kernels import alpha_c, bcfl, bcfl_grad_p, focal_loss, qfl, weighted_bce, weighted_mse
from app.loss.models import BcflParams, KernelParams
from app.loss.reduce import KERNELS, gradcheck, reduce_loss, reduce_losses
from app.oracle.reference import finite_diff

probability = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)
target = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
gammas = st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.0, 4.0])


def _uniform(value: float, shape: tuple[int, int, int] = (1, 3, 3)) -> Heatmap:
    return Heatmap(np.full(shape, value, dtype=np.float32), 4.0)


def test_focal_loss_examples() -> None:
    assert focal_loss(0.5, 1, 0.25, 2.0) == pytest.approx(0.25 * 0.25 * math.log(2), rel=1e-9)
    assert focal_loss(0.5, 1, 0.25, 2.0) == pytest.approx(0.04332, abs=1e-5)
    assert focal_loss(1.0 - 1e-12, 1, 0.25, 2.0) < 1e-12
    assert focal_loss(0.3, -1, 0.5, 0.0) == pytest.approx(-0.5 * math.log(0.7), rel=1e-12)


def test_focal_loss_rejects_soft_labels() -> None:
    with pytest.raises(DomainError):
        focal_loss(0.5, 0.5, 0.25, 2.0)


def test_qfl_examples() -> None:
    assert qfl(0.5, 0.0, 2.0) == pytest.approx(0.17329, abs=1e-5)
    assert qfl(0.4, 0.4, 2.0) == 0.0
    assert qfl(0.0, 0.0, 2.0) == 0.0


@given(p=probability, gamma=gammas)
def test_qfl_positive_target_matches_focal_without_alpha(p: float, gamma: float) -> None:
    # focal with alpha = 1 keeps only the positive branch weight of 1
    assert qfl(p, 1.0, gamma) == pytest.approx(focal_loss(p, 1, 1.0, gamma), abs=1e-12)


def test_alpha_c_examples() -> None:
    assert alpha_c(1.0, 0.75) == 0.75
    assert alpha_c(0.0, 0.75) == 0.25
    assert alpha_c(0.5, 0.75) == 0.5
    assert alpha_c(0.123, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_bcfl_examples() -> None:
    params = BcflParams(alpha=0.75, gamma=2.0)
    assert bcfl(0.5, 0.5, params) == 0.0
    expected = 0.65 * 0.04 * -(0.2 * math.log(0.4) + 0.8 * math.log(0.6))
    assert bcfl(0.6, 0.8, params) == pytest.approx(expected, rel=1e-9)
    assert bcfl(0.6, 0.8, params) == pytest.approx(0.015390, abs=1e-6)


@given(p=probability, y=target, gamma=gammas, alpha=st.floats(0.0, 1.0))
def test_bcfl_is_weighted_qfl(p: float, y: float, gamma: float, alpha: float) -> None:
    value = bcfl(p, y, BcflParams(alpha=alpha, gamma=gamma))
    assert value >= 0
    assert abs(value - alpha_c(y, alpha) * qfl(p, y, gamma)) <= 1e-12


def test_bcfl_decomposition_grid() -> None:
    p = np.linspace(0.01, 0.99, 50)
    y = np.linspace(0.0, 1.0, 50)
    pp, yy = np.meshgrid(p, y, indexing="ij")
    for gamma in (1.0, 2.0, 3.0, 4.0):
        for alpha in (0.25, 0.5, 0.75):
            params = BcflParams(alpha=alpha, gamma=gamma)
            balanced = bcfl(pp, yy, params)
            assert np.all(balanced >= 0)
            np.testing.assert_allclose(balanced, alpha_c(yy, alpha) * qfl(pp, yy, gamma), rtol=0, atol=1e-12)
            if alpha == 0.5:
                np.testing.assert_allclose(balanced, 0.5 * qfl(pp, yy, gamma), rtol=0, atol=1e-12)


def test_bcfl_below_qfl_for_low_targets() -> None:
    pp, yy = np.meshgrid(np.linspace(0.01, 0.99, 50), np.linspace(0.0, 0.5, 26), indexing="ij")
    params = BcflParams(alpha=0.75, gamma=2.0)
    assert np.all(bcfl(pp, yy, params) <= qfl(pp, yy, 2.0))
    low = yy < 0.5
    moving = pp != yy
    assert np.all(bcfl(pp, yy, params)[low & moving] < qfl(pp, yy, 2.0)[low & moving])


def test_gradient_matches_finite_differences_on_grid() -> None:
    grid = np.round(np.arange(1, 20) * 0.05, 2)
    pp, yy = np.meshgrid(grid, grid, indexing="ij")
    usable = np.abs(pp - yy) >= 1e-3
    p, y = pp[usable], yy[usable]
    for gamma in (1.0, 2.0, 3.0, 4.0):
        for alpha in (0.5, 0.75, 0.964):
            params = BcflParams(alpha=alpha, gamma=gamma)
            analytic = bcfl_grad_p(p, y, params)
            numeric = finite_diff(lambda q: bcfl(q, y, params), p, 1e-5)
            assert np.max(np.abs(analytic - numeric) / np.abs(analytic)) < 1e-5


def test_gradient_examples() -> None:
    params = BcflParams(alpha=0.75, gamma=2.0)
    assert bcfl_grad_p(0.4, 0.4, params) == 0.0
    assert bcfl_grad_p(0.5, 0.0, params) > 0
    assert bcfl_grad_p(0.6, 0.8, params) == pytest.approx(
        finite_diff(lambda q: bcfl(q, 0.8, params), 0.6, 1e-5), rel=1e-6
    )


def test_gradient_not_defined_at_target_for_small_gamma() -> None:
    with pytest.raises(NonDifferentiableError):
        bcfl_grad_p(0.3, 0.3, BcflParams(alpha=0.5, gamma=0.5))


def test_fixed_weight_baselines() -> None:
    assert weighted_mse(0.3, 0.8, 1.0) == pytest.approx(0.25)
    bce = -math.log(0.3)
    assert weighted_bce(0.3, 1.0, 1.0) == pytest.approx(bce)
    assert weighted_bce(0.3, 1.0, 10.0) == pytest.approx(10 * bce)
    assert weighted_mse(0.3, 1.0, 10.0) == pytest.approx(10 * 0.49)


def test_finite_diff_basics() -> None:
    assert finite_diff(lambda q: q * q, 3.0, 1e-5) == pytest.approx(6.0, abs=1e-8)
    assert finite_diff(lambda q: np.zeros_like(q) + 2.0, 0.4, 1e-5) == 0.0


def test_alpha_examples() -> None:
    assert estimate_alpha([Heatmap.zeros(1, 10, 10, 4.0)], 0.6) == 1.0
    data = np.zeros((1, 10, 10), dtype=np.float32)
    data[0, 0, :4] = [0.6, 0.7, 1.0, 0.95]
    assert estimate_alpha([Heatmap(data, 4.0)], 0.6) == 0.96


def test_alpha_sweep_counts_each_threshold() -> None:
    data = np.linspace(0.0, 0.9, 10, dtype=np.float32).reshape(1, 2, 5)
    sweep = estimate_alpha_sweep([Heatmap(data, 4.0)], [0.25, 0.5, 1.0])
    assert sweep == {0.25: 0.3, 0.5: 0.5, 1.0: 1.0}


def test_alpha_requires_cells_and_valid_threshold() -> None:
    with pytest.raises(EmptyInputError):
        estimate_alpha([], 0.6)
    with pytest.raises(DomainError):
        estimate_alpha([Heatmap.zeros(1, 1, 1, 4.0)], 1.5)


def test_identical_maps_reduce_to_zero() -> None:
    rng = np.random.default_rng(3)
    heatmap = Heatmap(rng.random((2, 4, 5), dtype=np.float32), 4.0)
    for kernel in ("qfl", "bcfl", "wmse"):
        assert reduce_loss(heatmap, heatmap, kernel, KernelParams()).total == 0.0


def test_single_cell_reduces_to_scalar_kernel() -> None:
    params = KernelParams(alpha=0.75, gamma=2.0)
    report = reduce_loss(_uniform(0.5, (1, 1, 1)), _uniform(0.25, (1, 1, 1)), "bcfl", params)
    assert report.total == pytest.approx(bcfl(0.5, 0.25, params.bcfl), rel=1e-9)
    assert report.cell_count == 1


def test_uniform_maps_reduce_to_per_cell_value() -> None:
    params = KernelParams(alpha=0.75, gamma=2.0)
    report = reduce_loss(_uniform(0.5), _uniform(0.8), "bcfl", params)
    pred, tgt = float(np.float32(0.5)), float(np.float32(0.8))
    per_cell = (0.75 * tgt + 0.25 * (1 - tgt)) * (tgt - pred) ** 2 * math.log(2)
    assert report.total == pytest.approx(per_cell, rel=1e-9)
    assert report.total == pytest.approx(0.04055, abs=1e-5)
    assert report.per_channel == [pytest.approx(per_cell, rel=1e-9)]


def test_bcfl_with_even_alpha_is_half_qfl() -> None:
    rng = np.random.default_rng(11)
    pred = Heatmap(rng.random((1, 6, 6), dtype=np.float32), 4.0)
    tgt = Heatmap(rng.random((1, 6, 6), dtype=np.float32), 4.0)
    params = KernelParams(alpha=0.5, gamma=2.0)
    bcfl_total = reduce_loss(pred, tgt, "bcfl", params).total
    qfl_total = reduce_loss(pred, tgt, "qfl", params).total
    assert bcfl_total == pytest.approx(0.5 * qfl_total, rel=1e-12)


def test_focal_kernel_binarizes_targets() -> None:
    params = KernelParams(alpha=0.25, gamma=2.0, fl_positive_threshold=0.6)
    report = reduce_loss(_uniform(0.5, (1, 1, 1)), _uniform(0.7, (1, 1, 1)), "fl", params)
    assert report.total == pytest.approx(focal_loss(0.5, 1, 0.25, 2.0), rel=1e-9)
    report = reduce_loss(_uniform(0.5, (1, 1, 1)), _uniform(0.5, (1, 1, 1)), "fl", params)
    assert report.total == pytest.approx(focal_loss(0.5, -1, 0.25, 2.0), rel=1e-9)


def test_every_kernel_reduces() -> None:
    pred, tgt = _uniform(0.3), _uniform(0.6)
    for kernel in KERNELS:
        report = reduce_losses([(pred, tgt), (pred, tgt)], kernel, KernelParams())
        assert report.kernel == kernel
        assert report.cell_count == 18
        assert report.total > 0


def test_reduce_rejects_mismatched_shapes() -> None:
    with pytest.raises(ShapeMismatchError):
        reduce_loss(_uniform(0.3, (1, 2, 2)), _uniform(0.3, (1, 2, 3)), "bcfl", KernelParams())
    with pytest.raises(EmptyInputError):
        reduce_losses([], "bcfl", KernelParams())


def test_gradcheck_on_random_maps() -> None:
    rng = np.random.default_rng(5)
    pred = Heatmap(rng.uniform(0.02, 0.98, size=(2, 8, 8)).astype(np.float32), 4.0)
    tgt = Heatmap(rng.random((2, 8, 8), dtype=np.float32), 4.0)
    assert gradcheck(pred, tgt, KernelParams(alpha=0.75, gamma=2.0)) < 1e-5
