import logging
import time
from collections.abc import Callable

import numpy as np

from app.annotations.geometry import ground_truth_centers
from app.annotations.models import BoundingBox, ImageInfo
from app.heatmap.models import GcParams
from app.heatmap.render import gc_value
from app.loss.kernels import alpha_c, bcfl, bcfl_grad_p, qfl
from app.loss.models import BcflParams
from app.matching.hungarian import brute_force_assignment, hungarian
from app.matching.models import MatchCostParams
from app.matching.refine import match_and_refine
from app.metrics.scoring import cas, score_unit
from app.oracle.models import SelftestCase
from app.oracle.reference import centerness_reference, exhaustive_cas, finite_diff
from app.peaks.models import CenterPoint

logger = logging.getLogger(__name__)

GC_POINTS = 2_000
ASSIGNMENT_MATRICES = 200
CAS_INSTANCES = 100
GRID = np.round(np.arange(1, 20) * 0.05, 2)
GAMMAS = (1.0, 2.0, 3.0, 4.0)
ALPHAS = (0.5, 0.75, 0.964)


def _random_box(rng: np.random.Generator, width: float, height: float, image_id: int = 1) -> BoundingBox:
    w = float(rng.uniform(4.0, width / 2))
    h = float(rng.uniform(4.0, height / 2))
    x = float(rng.uniform(0.0, width - w))
    y = float(rng.uniform(0.0, height - h))
    return BoundingBox(x=x, y=y, w=w, h=h, category_id=1, image_id=image_id)


def check_gc_identity(rng: np.random.Generator, count: int = GC_POINTS) -> SelftestCase:
    params = GcParams(eta=0.5, phi=0.5)
    worst = 0.0
    for _ in range(count):
        box = _random_box(rng, 400.0, 400.0)
        x = float(rng.uniform(box.x, box.x1))
        y = float(rng.uniform(box.y, box.y1))
        if not (box.x < x < box.x1 and box.y < y < box.y1):
            continue
        value = gc_value(x - box.x, box.x1 - x, y - box.y, box.y1 - y, params)
        worst = max(worst, abs(value - centerness_reference(x, y, box)))
    return SelftestCase("gc_centerness_identity", worst <= 1e-12, count, worst)


def check_bcfl_decomposition(rng: np.random.Generator) -> SelftestCase:
    p = np.linspace(0.01, 0.99, 50)
    y = np.linspace(0.0, 1.0, 50)
    pp, yy = np.meshgrid(p, y, indexing="ij")
    worst = 0.0
    non_negative = True
    for gamma in GAMMAS:
        for alpha in (0.25, 0.5, 0.75):
            params = BcflParams(alpha=alpha, gamma=gamma)
            balanced = np.asarray(bcfl(pp, yy, params))
            expected = np.asarray(alpha_c(yy, alpha)) * np.asarray(qfl(pp, yy, gamma))
            worst = max(worst, float(np.max(np.abs(balanced - expected))))
            non_negative = non_negative and bool(np.all(balanced >= 0))
    passed = worst <= 1e-12 and non_negative
    return SelftestCase("bcfl_decomposition", passed, pp.size * len(GAMMAS) * 3, worst)


def check_gradient(rng: np.random.Generator, h: float = 1e-5) -> SelftestCase:
    pp, yy = np.meshgrid(GRID, GRID, indexing="ij")
    usable = np.abs(pp - yy) >= 1e-3
    p, y = pp[usable], yy[usable]
    worst = 0.0
    for gamma in GAMMAS:
        for alpha in ALPHAS:
            params = BcflParams(alpha=alpha, gamma=gamma)
            analytic = np.asarray(bcfl_grad_p(p, y, params))
            numeric = np.asarray(finite_diff(lambda q: bcfl(q, y, params), p, h))
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1e-300)
            worst = max(worst, float(np.max(rel)))
    return SelftestCase("bcfl_gradient", worst < 1e-5, p.size * len(GAMMAS) * len(ALPHAS), worst)


def check_assignment(rng: np.random.Generator, count: int = ASSIGNMENT_MATRICES) -> SelftestCase:
    shapes = [(n, n) for n in range(1, 8)] + [(3, 6), (6, 3)]
    worst = 0.0
    for index in range(count):
        rows, cols = shapes[index % len(shapes)]
        matrix = rng.uniform(0.0, 10.0, size=(rows, cols))
        worst = max(worst, abs(hungarian(matrix).total - brute_force_assignment(matrix).total))
    return SelftestCase("assignment_optimality", worst <= 1e-9, count, worst)


def random_unit(rng: np.random.Generator, max_points: int = 5):
    image = ImageInfo(id=1, width=int(rng.integers(64, 321)), height=int(rng.integers(64, 321)))
    n_gt = int(rng.integers(0, max_points + 1))
    n_pred = int(rng.integers(0, max_points + 1))
    if n_gt == 0 and n_pred == 0:
        n_gt = 1
    gts = ground_truth_centers([_random_box(rng, image.width, image.height) for _ in range(n_gt)])
    preds = []
    for j in range(n_pred):
        if j < n_gt and rng.random() < 0.7:
            x = gts[j].x + float(rng.normal(0.0, gts[j].D / 2))
            y = gts[j].y + float(rng.normal(0.0, gts[j].D / 2))
        else:
            x = float(rng.uniform(0, image.width))
            y = float(rng.uniform(0, image.height))
        preds.append(CenterPoint(x=x, y=y, score=float(rng.uniform(0.3, 1.0)), category_id=1, image_id=1))
    return gts, preds, image


def check_cas_equivalence(rng: np.random.Generator, count: int = CAS_INSTANCES) -> SelftestCase:
    params = MatchCostParams()
    worst = 0.0
    for _ in range(count):
        gts, preds, image = random_unit(rng)
        match = match_and_refine(gts, preds, params, image)
        pipeline = cas([score_unit(match, gts, preds, image_id=image.id, category_id=1)])[0]
        worst = max(worst, abs(pipeline - exhaustive_cas(gts, preds, params, image)))
    return SelftestCase("cas_oracle_equivalence", worst <= 1e-9, count, worst)


SUITES: tuple[Callable[[np.random.Generator], SelftestCase], ...] = (
    check_gc_identity,
    check_bcfl_decomposition,
    check_gradient,
    check_assignment,
    check_cas_equivalence,
)


def run_selftest(seed: int = 0) -> list[SelftestCase]:
    rng = np.random.default_rng(seed)
    results: list[SelftestCase] = []
    for suite in SUITES:
        started = time.perf_counter()
        case = suite(rng)
        logger.info(
            "selftest case=%s passed=%s instances=%s max_error=%.3g elapsed=%.3fs",
            case.name,
            case.passed,
            case.instances,
            case.max_error,
            time.perf_counter() - started,
        )
        results.append(case)
    return results
