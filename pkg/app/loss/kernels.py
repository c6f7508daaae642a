import numpy as np

from app.errors import DomainError, NonDifferentiableError
from app.loss.models import BcflParams

EPS = 1e-7

ArrayLike = float | np.ndarray


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def clamp_probability(p: ArrayLike) -> np.ndarray:
    return np.clip(np.asarray(p, dtype=np.float64), EPS, 1.0 - EPS)


def _unit(values: ArrayLike) -> np.ndarray:
    return np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)


def _cross_entropy(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    # p must already be clamped away from 0 and 1
    return -((1.0 - y) * np.log1p(-p) + y * np.log(p))


def focal_loss(p: ArrayLike, y: ArrayLike, alpha: float, gamma: float) -> ArrayLike:
    p = clamp_probability(p)
    y = np.asarray(y, dtype=np.float64)
    if not np.all((y == 1.0) | (y == -1.0)):
        raise DomainError("focal loss labels must be -1 or +1")
    positive = y > 0
    p_t = np.where(positive, p, 1.0 - p)
    alpha_t = np.where(positive, alpha, 1.0 - alpha)
    return _out(-alpha_t * (1.0 - p_t) ** gamma * np.log(p_t))


def qfl(p: ArrayLike, y: ArrayLike, gamma: float) -> ArrayLike:
    y = np.asarray(y, dtype=np.float64)
    # The modulating gap uses the unclamped prediction so that p == y gives exactly 0.
    gap = np.abs(y - _unit(p))
    return _out(gap**gamma * _cross_entropy(clamp_probability(p), y))


def alpha_c(y: ArrayLike, alpha: float) -> ArrayLike:
    y = np.asarray(y, dtype=np.float64)
    return _out(alpha * y + (1.0 - alpha) * (1.0 - y))


def bcfl(p: ArrayLike, y: ArrayLike, params: BcflParams) -> ArrayLike:
    return _out(np.asarray(alpha_c(y, params.alpha)) * np.asarray(qfl(p, y, params.gamma)))


def bcfl_grad_p(p: ArrayLike, y: ArrayLike, params: BcflParams) -> ArrayLike:
    y = np.asarray(y, dtype=np.float64)
    gamma = params.gamma
    diff = _unit(p) - y
    at_target = diff == 0
    if gamma < 1 and bool(np.any(at_target)):
        raise NonDifferentiableError(f"bcfl is not differentiable at p == y for gamma={gamma} < 1")

    p = clamp_probability(p)
    gap = np.abs(diff)
    weight = np.asarray(alpha_c(y, params.alpha))
    # d|p-y|^g/dp = g |p-y|^(g-1) sign(p-y);  dCE/dp = (p-y) / (p (1-p))
    with np.errstate(divide="ignore", invalid="ignore"):
        modulating_grad = np.where(at_target, 0.0, gamma * gap ** (gamma - 1.0) * np.sign(diff))
    ce_grad = (p - y) / (p * (1.0 - p))
    grad = weight * (modulating_grad * _cross_entropy(p, y) + gap**gamma * ce_grad)
    return _out(np.where(at_target, 0.0, grad))


def _fixed_weight(y: np.ndarray, pos_weight: float) -> np.ndarray:
    return pos_weight * y + (1.0 - y)


def weighted_bce(p: ArrayLike, y: ArrayLike, pos_weight: float) -> ArrayLike:
    y = np.asarray(y, dtype=np.float64)
    return _out(_fixed_weight(y, pos_weight) * _cross_entropy(clamp_probability(p), y))


def weighted_mse(p: ArrayLike, y: ArrayLike, pos_weight: float) -> ArrayLike:
    y = np.asarray(y, dtype=np.float64)
    return _out(_fixed_weight(y, pos_weight) * (_unit(p) - y) ** 2)
