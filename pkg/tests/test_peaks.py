import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from app.errors import DomainError, PointsParseError, ShapeMismatchError
from app.heatmap.models import Heatmap
from app.peaks.extract import find_peaks, local_maxima, peaks_per_class
from app.peaks.models import CenterPoint, PeakParams
from app.peaks.records import encode_points, parse_points, sort_points


def _grid(height: int, width: int, cells: dict[tuple[int, int], float], channels: int = 1) -> Heatmap:
    data = np.zeros((channels, height, width), dtype=np.float32)
    for (i, j), value in cells.items():
        data[:, i, j] = value
    return Heatmap(data, 4.0)


def test_single_spike_maps_to_image_coordinates() -> None:
    (point,) = find_peaks(_grid(5, 6, {(2, 3): 0.9}), PeakParams(), category_id=4, image_id=9)
    assert (point.x, point.y) == (14.0, 10.0)
    assert point.score == pytest.approx(0.9)
    assert (point.category_id, point.image_id) == (4, 9)


def test_close_peaks_are_suppressed_greedily() -> None:
    channel = _grid(6, 8, {(2, 1): 0.9, (2, 3): 0.8})
    points = find_peaks(channel, PeakParams(min_distance=3.0))
    assert len(points) == 1
    assert points[0].score == pytest.approx(0.9)
    assert len(find_peaks(channel, PeakParams(min_distance=2.0))) == 2


def test_uniform_plateau_yields_one_peak() -> None:
    channel = Heatmap(np.full((1, 5, 5), 0.7, dtype=np.float32), 4.0)
    (point,) = find_peaks(channel, PeakParams(prob_threshold=0.5))
    assert (point.x, point.y) == (2.0, 2.0)


def test_threshold_above_one_rejects_everything() -> None:
    assert find_peaks(_grid(3, 3, {(1, 1): 1.0}), PeakParams(prob_threshold=1.1)) == []


def test_peaks_sorted_by_descending_score() -> None:
    channel = _grid(10, 10, {(1, 1): 0.6, (8, 8): 0.95, (1, 8): 0.8})
    scores = [p.score for p in find_peaks(channel, PeakParams())]
    assert scores == sorted(scores, reverse=True)
    assert len(scores) == 3


def test_local_maxima_respects_window_radius() -> None:
    grid = np.zeros((7, 7), dtype=np.float64)
    grid[3, 1] = 0.6
    grid[3, 3] = 0.9
    assert local_maxima(grid, 1)[3, 1]
    assert not local_maxima(grid, 2)[3, 1]


def test_per_class_keeps_same_cell_spikes_in_each_channel() -> None:
    heatmap = _grid(4, 4, {(1, 2): 0.9}, channels=2)
    points = peaks_per_class(heatmap, [5, 6], PeakParams(), image_id=1)
    assert [p.category_id for p in points] == [5, 6]
    assert points[0].x == points[1].x


def test_per_class_requires_channel_association() -> None:
    heatmap = _grid(4, 4, {}, channels=2)
    with pytest.raises(ShapeMismatchError):
        peaks_per_class(heatmap, [1], PeakParams())
    with pytest.raises(ShapeMismatchError):
        peaks_per_class(heatmap, None, PeakParams())


def test_empty_heatmap_has_no_points() -> None:
    assert peaks_per_class(Heatmap.zeros(0, 3, 3, 4.0), [], PeakParams()) == []
    assert find_peaks(Heatmap.zeros(1, 0, 0, 4.0), PeakParams()) == []


def test_peak_params_domain() -> None:
    with pytest.raises(DomainError):
        PeakParams(window_radius=0)
    with pytest.raises(DomainError):
        PeakParams(prob_threshold=-0.1)


@settings(max_examples=60)
@given(arrays(np.float32, (6, 7), elements=st.sampled_from([0.0, 0.25, 0.5, 0.625, 0.75, 1.0])))
def test_peaks_are_thresholded_separated_and_deterministic(values: np.ndarray) -> None:
    channel = Heatmap(values[np.newaxis], 4.0)
    params = PeakParams(prob_threshold=0.5, min_distance=2.0)
    first = find_peaks(channel, params)
    assert first == find_peaks(channel, params)
    for point in first:
        assert point.score >= 0.5
    cells = [((p.y / 4.0) - 0.5, (p.x / 4.0) - 0.5) for p in first]
    for a in range(len(cells)):
        for b in range(a + 1, len(cells)):
            assert np.hypot(cells[a][0] - cells[b][0], cells[a][1] - cells[b][1]) >= 2.0


def test_jsonl_is_sorted_and_parses_back() -> None:
    points = [
        CenterPoint(x=1.0, y=2.0, score=0.4, category_id=2, image_id=1),
        CenterPoint(x=5.0, y=6.0, score=0.9, category_id=2, image_id=1),
        CenterPoint(x=3.0, y=3.0, score=0.7, category_id=1, image_id=2),
        CenterPoint(x=9.0, y=9.0, score=0.5, category_id=1, image_id=1),
    ]
    raw = encode_points(points)
    assert raw.count(b"\n") == 4
    assert parse_points(raw) == sort_points(points)
    assert [(p.image_id, p.category_id, p.score) for p in parse_points(raw)] == [
        (1, 1, 0.5),
        (1, 2, 0.9),
        (1, 2, 0.4),
        (2, 1, 0.7),
    ]


def test_bad_point_line_reports_line_number() -> None:
    raw = b'{"image_id": 1, "category_id": 1, "x": 0, "y": 0, "score": 0.5}\n{"image_id": 1}\n'
    with pytest.raises(PointsParseError) as excinfo:
        parse_points(raw)
    assert excinfo.value.line == 2
    assert excinfo.value.exit_code == 2


def test_score_outside_unit_interval_is_rejected() -> None:
    with pytest.raises(PointsParseError):
        parse_points(b'{"image_id": 1, "category_id": 1, "x": 0, "y": 0, "score": 1.5}\n')


def test_shelf_beside_higher_cell_keeps_its_own_peak() -> None:
    grid = np.zeros((3, 12), dtype=np.float32)
    grid[:, 2] = 0.8
    grid[:, 3:10] = 0.6
    assert [tuple(rc) for rc in np.argwhere(local_maxima(grid, 1) & (grid > 0))] == [(0, 2), (0, 4)]

    points = find_peaks(Heatmap(grid[np.newaxis], 4.0), PeakParams(prob_threshold=0.5, min_distance=0.0))
    assert [p.score for p in points] == pytest.approx([0.8, 0.6])
    assert (points[1].x, points[1].y) == (18.0, 2.0)


def test_separate_plateaus_each_keep_their_first_cell() -> None:
    grid = np.zeros((4, 9), dtype=np.float64)
    grid[1, 1:3] = 0.7
    grid[1, 6:8] = 0.7
    assert [tuple(rc) for rc in np.argwhere(local_maxima(grid, 1) & (grid > 0))] == [(1, 1), (1, 6)]


LEVELS = [0.0, 0.25, 0.5, 0.625, 0.75, 1.0]


@settings(max_examples=60)
@given(
    arrays(np.float32, (6, 7), elements=st.sampled_from(LEVELS)),
    st.integers(min_value=1, max_value=2),
)
def test_peaks_dominate_their_window(values: np.ndarray, radius: int) -> None:
    channel = Heatmap(values[np.newaxis], 4.0)
    for point in find_peaks(channel, PeakParams(prob_threshold=0.0, min_distance=0.0, window_radius=radius)):
        row, col = int(point.y / 4.0), int(point.x / 4.0)
        window = values[max(row - radius, 0) : row + radius + 1, max(col - radius, 0) : col + radius + 1]
        assert values[row, col] >= window.max()
        assert point.score == float(values[row, col])


@settings(max_examples=60)
@given(
    arrays(np.float32, (6, 7), elements=st.sampled_from(LEVELS)),
    st.sampled_from([1.0, 0.75, 0.5, 0.25, 0.125]),
)
def test_scaling_the_map_keeps_the_maxima(values: np.ndarray, scale: float) -> None:
    params = PeakParams(prob_threshold=0.0, min_distance=0.0)
    before = find_peaks(Heatmap(values[np.newaxis], 4.0), params)
    after = find_peaks(Heatmap((values * np.float32(scale))[np.newaxis], 4.0), params)
    assert sorted((p.x, p.y) for p in before) == sorted((p.x, p.y) for p in after)
