import math

import numpy as np
import pytest

from cellspread import (
    CellMeasurement,
    SegmentationResult,
    circularity,
    evaluate,
    mask_perimeter,
    measure_frame,
    perimeter,
    population_curve,
    trace_contour,
)
from oracle_utils import oracle_dilate, raster_disk


def _mask(coords, shape):
    m = np.zeros(shape, dtype=bool)
    for r, c in coords:
        m[r, c] = True
    return m


# ---- contour tracing: frozen hand-derived shapes ---------------------------


def test_contour_single_pixel():
    m = _mask([(2, 3)], (5, 6))
    assert trace_contour(m) == [(2, 3)]


def test_contour_3x3_square_clockwise():
    m = np.zeros((5, 5), dtype=bool)
    m[1:4, 1:4] = True
    expected = [(1, 1), (1, 2), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1), (2, 1)]
    assert trace_contour(m) == expected


def test_contour_domino_each_pixel_once():
    m = _mask([(1, 1), (1, 2)], (4, 4))
    assert trace_contour(m) == [(1, 1), (1, 2)]


def test_contour_vertical_line_walks_both_sides():
    m = _mask([(0, 0), (1, 0), (2, 0)], (4, 3))
    # a 1-px spur is traversed down one side and back up the other,
    # so the middle pixel appears twice
    assert trace_contour(m) == [(0, 0), (1, 0), (2, 0), (1, 0)]


def test_contour_diagonal_pair():
    m = _mask([(0, 0), (1, 1)], (3, 3))
    assert trace_contour(m) == [(0, 0), (1, 1)]


def test_contour_empty_mask_raises():
    with pytest.raises(ValueError):
        trace_contour(np.zeros((4, 4), dtype=bool))


def test_contour_two_components_raises():
    m = _mask([(0, 0), (3, 3)], (5, 5))
    with pytest.raises(ValueError):
        trace_contour(m)


def test_contour_properties_on_random_blobs():
    rng = np.random.default_rng(17)
    cases = 0
    while cases < 25:
        seeds = rng.random((14, 14)) > 0.9
        blob = oracle_dilate(seeds, 2)
        from oracle_utils import oracle_largest_object

        blob = oracle_largest_object(blob)
        if blob.sum() < 3:
            continue
        cases += 1
        contour = trace_contour(blob)
        h, w = blob.shape
        # every contour pixel is foreground
        assert all(blob[r, c] for r, c in contour)
        # consecutive steps (and the closing step) are 8-neighbor moves
        for (r1, c1), (r2, c2) in zip(contour, contour[1:] + contour[:1]):
            if len(contour) > 1:
                assert max(abs(r1 - r2), abs(c1 - c2)) == 1
        # each contour pixel touches background or the image edge
        for r, c in contour:
            touches = False
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    rr, cc = r + dr, c + dc
                    if not (0 <= rr < h and 0 <= cc < w) or not blob[rr, cc]:
                        touches = True
            assert touches


# ---- perimeter ---------------------------------------------------------------


def test_perimeter_single_pixel_unit_square():
    assert perimeter([(3, 3)]) == 4.0


def test_perimeter_3x3_square():
    m = np.zeros((5, 5), dtype=bool)
    m[1:4, 1:4] = True
    assert perimeter(trace_contour(m)) == 8.0


def test_perimeter_domino():
    assert perimeter([(1, 1), (1, 2)]) == 2.0


def test_perimeter_diagonal_steps_are_sqrt2():
    assert perimeter([(0, 0), (1, 1)]) == pytest.approx(2 * math.sqrt(2))


def test_perimeter_empty_contour_raises():
    with pytest.raises(ValueError):
        perimeter([])


def test_perimeter_disk_near_circumference():
    disk = raster_disk(40)
    p = perimeter(trace_contour(disk))
    analytic = 2 * math.pi * 40
    assert abs(p - analytic) / analytic < 0.12


def test_perimeter_translation_invariant():
    rng = np.random.default_rng(18)
    blob = oracle_dilate(rng.random((10, 10)) > 0.85, 2)
    from oracle_utils import oracle_largest_object

    blob = oracle_largest_object(blob)
    big = np.zeros((30, 30), dtype=bool)
    big[3:13, 4:14] = blob
    shifted = np.zeros((30, 30), dtype=bool)
    shifted[11:21, 9:19] = blob
    assert perimeter(trace_contour(big)) == perimeter(trace_contour(shifted))


# ---- circularity ---------------------------------------------------------------


def test_circularity_analytic_circle_exact():
    for r in (20.0, 40.0, 80.0):
        assert circularity(math.pi * r * r, 2 * math.pi * r) == 1.0


def test_circularity_square():
    s = 12.0
    assert circularity(s * s, 4 * s) == pytest.approx(math.pi / 4)
    assert circularity(100, 40) == pytest.approx(math.pi / 4)


def test_circularity_rasterized_disks_in_band():
    for r in (20, 40, 80):
        disk = raster_disk(r)
        value = circularity(int(disk.sum()), perimeter(trace_contour(disk)))
        assert 0.85 <= value <= 1.15, f"r={r}: {value}"


def test_circularity_zero_perimeter_rejected():
    with pytest.raises(ValueError):
        circularity(10, 0.0)


# ---- measure_frame --------------------------------------------------------------


def _result(mask):
    return SegmentationResult(
        mask=mask, object_area=int(mask.sum()), threshold_used=0.5
    )


def test_measure_frame_empty_mask():
    m = measure_frame(_result(np.zeros((6, 6), dtype=bool)), 4, 40.0)
    assert m == CellMeasurement(4, 40.0, 0, 0.0, 0.0, False)


def test_measure_frame_square():
    mask = np.zeros((6, 6), dtype=bool)
    mask[1:4, 1:4] = True
    m = measure_frame(_result(mask), 2, 20.0)
    assert m.detected
    assert m.area == 9
    assert m.perimeter == 8.0
    assert m.circularity == pytest.approx(4 * math.pi * 9 / 64)
    assert m.frame_index == 2 and m.timestamp == 20.0


def test_measure_frame_area_matches_mask_exactly():
    rng = np.random.default_rng(19)
    blob = oracle_dilate(rng.random((12, 12)) > 0.88, 2)
    from oracle_utils import oracle_largest_object

    blob = oracle_largest_object(blob)
    m = measure_frame(_result(blob), 0, 0.0)
    assert m.area == int(blob.sum())


# ---- population curve -------------------------------------------------------------


def _series(areas, interval=10.0):
    return [
        CellMeasurement(i, i * interval, a, 4.0 if a else 0.0, 1.0 if a else 0.0, a > 0)
        for i, a in enumerate(areas)
    ]


def test_population_single_cell_step():
    curve = population_curve([_series([10, 50, 100, 100])], 0.95)
    assert curve.fractions == [0.0, 0.0, 1.0, 1.0]
    assert curve.timestamps == [0.0, 10.0, 20.0, 30.0]


def test_population_two_cells_staggered():
    a = _series([10, 100, 100, 100])  # reaches at frame 1
    b = _series([10, 20, 50, 100])  # reaches at frame 3
    curve = population_curve([a, b], 0.95)
    assert curve.fractions == [0.0, 0.5, 0.5, 1.0]


def test_population_literal_full_spread():
    # f=1.0: only the literal maximum counts
    areas = [10, 99, 100, 100]
    curve = population_curve([_series(areas)], 1.0)
    assert curve.fractions == [0.0, 0.0, 1.0, 1.0]


def test_population_never_detected_cell_never_spreads():
    dead = _series([0, 0, 0, 0])
    alive = _series([5, 80, 100, 100])
    curve = population_curve([dead, alive], 0.95)
    assert curve.fractions == [0.0, 0.0, 0.5, 0.5]


def test_population_fractions_non_decreasing():
    rng = np.random.default_rng(20)
    series = [
        _series(list(rng.integers(0, 200, size=8))) for _ in range(6)
    ]
    curve = population_curve(series, 0.95)
    assert all(b >= a for a, b in zip(curve.fractions, curve.fractions[1:]))
    assert all(0.0 <= f <= 1.0 for f in curve.fractions)


def test_population_requires_shared_timestamps():
    a = _series([1, 2, 3])
    b = _series([1, 2, 3], interval=5.0)
    with pytest.raises(ValueError):
        population_curve([a, b])


def test_population_rejects_bad_fraction():
    with pytest.raises(ValueError):
        population_curve([_series([1, 2])], 0.0)
    with pytest.raises(ValueError):
        population_curve([_series([1, 2])], 1.5)


def test_population_rejects_empty_input():
    with pytest.raises(ValueError):
        population_curve([])
    with pytest.raises(ValueError):
        population_curve([[]])


# ---- evaluate ------------------------------------------------------------------


def test_evaluate_identical():
    mask = raster_disk(10)
    r = evaluate(mask, mask)
    assert r.dice == 1.0 and r.iou == 1.0 and r.perimeter_rel_error == 0.0


def test_evaluate_disjoint():
    a = np.zeros((20, 20), dtype=bool)
    b = np.zeros((20, 20), dtype=bool)
    a[2:6, 2:6] = True
    b[10:14, 10:14] = True
    r = evaluate(a, b)
    assert r.dice == 0.0 and r.iou == 0.0
    assert r.perimeter_rel_error == 0.0  # same shape, same perimeter


def test_evaluate_counting_example():
    a = np.zeros((20, 20), dtype=bool)
    b = np.zeros((20, 20), dtype=bool)
    a[0:10, 0:10] = True  # 100 px
    b[0:10, 5:15] = True  # 100 px, overlap 50
    r = evaluate(a, b)
    assert r.dice == pytest.approx(0.5)
    assert r.iou == pytest.approx(1.0 / 3.0)


def test_evaluate_both_empty_agree():
    empty = np.zeros((8, 8), dtype=bool)
    r = evaluate(empty, empty)
    assert (r.dice, r.iou, r.perimeter_rel_error) == (1.0, 1.0, 0.0)


def test_evaluate_empty_truth_nonempty_mask():
    mask = np.zeros((8, 8), dtype=bool)
    mask[2:4, 2:4] = True
    r = evaluate(mask, np.zeros((8, 8), dtype=bool))
    assert r.dice == 0.0
    assert math.isinf(r.perimeter_rel_error)


def test_evaluate_shape_mismatch():
    with pytest.raises(ValueError):
        evaluate(np.zeros((4, 4), dtype=bool), np.zeros((5, 5), dtype=bool))


def test_evaluate_matches_set_arithmetic_and_dice_iou_identity():
    rng = np.random.default_rng(23)
    for _ in range(20):
        a = rng.random((15, 15)) > 0.6
        b = rng.random((15, 15)) > 0.6
        r = evaluate(a, b)
        set_a = {(i, j) for i, j in zip(*np.nonzero(a))}
        set_b = {(i, j) for i, j in zip(*np.nonzero(b))}
        inter = len(set_a & set_b)
        union = len(set_a | set_b)
        if set_a or set_b:
            assert r.dice == pytest.approx(2 * inter / (len(set_a) + len(set_b)))
            assert r.iou == pytest.approx(inter / union)
            assert r.dice == pytest.approx(2 * r.iou / (1 + r.iou))
        sym = evaluate(b, a)
        assert sym.dice == r.dice and sym.iou == r.iou


def test_mask_perimeter_empty_and_simple():
    assert mask_perimeter(np.zeros((5, 5), dtype=bool)) == 0.0
    m = np.zeros((5, 5), dtype=bool)
    m[1:4, 1:4] = True
    assert mask_perimeter(m) == 8.0
