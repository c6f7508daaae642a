import numpy as np
import pytest

from app.annotations.geometry import ground_truth_centers
from app.annotations.models import BoundingBox, ImageInfo
from app.errors import OracleSizeError
from app.matching.models import GroundTruthCenter, MatchCostParams
from app.matching.refine import match_and_refine
from app.metrics.scoring import cas, score_unit
from app.oracle.reference import exhaustive_cas, gc_reference
from app.oracle.selftest import random_unit, run_selftest
from app.peaks.models import CenterPoint

BOX = BoundingBox(x=0, y=0, w=4, h=4, category_id=1, image_id=1)


def test_gc_reference_examples() -> None:
    assert gc_reference(2, 2, BOX, 0.5, 0.5) == 1.0
    assert gc_reference(1, 1, BOX, 0.5, 0.5) == pytest.approx(1 / 3, abs=1e-12)
    assert gc_reference(0, 2, BOX, 0.5, 0.5) == 0.0
    assert gc_reference(5, 2, BOX, 0.5, 0.5) == 0.0


def test_exhaustive_cas_mirrors_hand_examples() -> None:
    image = ImageInfo(id=1, width=100, height=100)
    params = MatchCostParams()
    gts = ground_truth_centers([BoundingBox(x=0, y=0, w=3, h=4, category_id=1, image_id=1)])
    pred = [CenterPoint(x=1.5, y=0.5, score=1.0, category_id=1)]
    assert exhaustive_cas(gts, pred, params, image) == pytest.approx(0.4)
    assert exhaustive_cas(gts, [], params, image) == 0.0


def test_exhaustive_cas_size_limit() -> None:
    image = ImageInfo(id=1, width=100, height=100)
    gts = [GroundTruthCenter(x=float(i), y=0.0, D=1.0) for i in range(8)]
    with pytest.raises(OracleSizeError):
        exhaustive_cas(gts, [], MatchCostParams(), image)


def test_pipeline_matches_exhaustive_cas_on_random_units() -> None:
    rng = np.random.default_rng(12345)
    params = MatchCostParams()
    for _ in range(200):
        gts, preds, image = random_unit(rng)
        match = match_and_refine(gts, preds, params, image)
        pipeline = cas([score_unit(match, gts, preds)])[0]
        assert abs(pipeline - exhaustive_cas(gts, preds, params, image)) <= 1e-9


def test_selftest_suites_pass() -> None:
    cases = run_selftest(seed=3)
    assert [case.name for case in cases] == [
        "gc_centerness_identity",
        "bcfl_decomposition",
        "bcfl_gradient",
        "assignment_optimality",
        "cas_oracle_equivalence",
    ]
    assert all(case.passed for case in cases), cases
