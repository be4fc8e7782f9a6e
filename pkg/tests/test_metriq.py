"""Metric oracles: hand-tallied confusion matrices, closed-form Brier
values, calibration partitioning, bootstrap determinism and coverage."""

import numpy as np
import pytest

from histocad.labels import CANONICAL_CLASSES, NUM_CLASSES
from histocad.metriq import (
    ConfusionMatrix,
    EmptyInputError,
    ProbabilityValidationError,
    bootstrap_ci,
    brier_score,
    calibration_curve,
    macro_metrics,
    metrics_for_log,
    tile_accuracy,
)
from histocad.trainkit.predlog import PatchPrediction, PredictionLog

RNG = np.random.default_rng(77)


def _record(pred_idx, true_idx, patient="p1", confidence=0.9, row=0):
    probs = np.full(NUM_CLASSES, (1 - confidence) / (NUM_CLASSES - 1))
    probs[pred_idx] = confidence
    return PatchPrediction("s1", patient, row, 0, CANONICAL_CLASSES[true_idx],
                           CANONICAL_CLASSES[pred_idx], tuple(probs))


# -- confusion matrix -------------------------------------------------------


def test_perfect_predictions_are_diagonal():
    pairs = [(c, c) for c in CANONICAL_CLASSES for _ in range(3)]
    cm = ConfusionMatrix.from_pairs(pairs)
    assert cm.total == 33
    assert np.trace(cm.counts) == 33
    assert (cm.counts == np.diag(np.diag(cm.counts))).all()


def test_hand_tally_three_units():
    a, b = CANONICAL_CLASSES[0], CANONICAL_CLASSES[1]
    cm = ConfusionMatrix.from_pairs([(a, a), (a, b), (b, b)])
    sub = cm.counts[:2, :2]
    np.testing.assert_array_equal(sub, [[1, 1], [0, 1]])


def test_row_sums_match_true_counts():
    true = RNG.integers(0, NUM_CLASSES, size=500)
    pred = RNG.integers(0, NUM_CLASSES, size=500)
    cm = ConfusionMatrix.from_pairs(
        (CANONICAL_CLASSES[t], CANONICAL_CLASSES[p]) for t, p in zip(true, pred)
    )
    for i in range(NUM_CLASSES):
        assert cm.counts[i].sum() == (true == i).sum()
        assert cm.counts[:, i].sum() == (pred == i).sum()


def test_unknown_label_rejected():
    from histocad.labels import UnknownLabelError

    with pytest.raises(UnknownLabelError):
        ConfusionMatrix.from_pairs([("Nope", "Non-Tumor")])


# -- macro metrics -----------------------------------------------------------


def test_perfect_metrics_are_one():
    pairs = [(c, c) for c in CANONICAL_CLASSES]
    report = macro_metrics(ConfusionMatrix.from_pairs(pairs))
    assert report.accuracy == 1.0
    assert report.sensitivity == 1.0
    assert report.specificity == 1.0
    assert report.f1 == 1.0


def test_two_class_hand_arithmetic():
    cm = ConfusionMatrix(np.array([[8, 2], [1, 9]], dtype=np.int64), labels=("A", "B"))
    report = macro_metrics(cm)
    assert report.per_class["A"]["sensitivity"] == pytest.approx(0.8, abs=1e-12)
    assert report.per_class["B"]["sensitivity"] == pytest.approx(0.9, abs=1e-12)
    assert report.sensitivity == pytest.approx(0.85, abs=1e-12)


def test_macro_class_order_invariance():
    counts = RNG.integers(0, 20, size=(4, 4)).astype(np.int64)
    labels = ("A", "B", "C", "D")
    base = macro_metrics(ConfusionMatrix(counts.copy(), labels))
    perm = [2, 0, 3, 1]
    permuted = counts[np.ix_(perm, perm)]
    swapped = macro_metrics(ConfusionMatrix(permuted, tuple(labels[i] for i in perm)))
    assert swapped.accuracy == pytest.approx(base.accuracy, abs=1e-12)
    assert swapped.sensitivity == pytest.approx(base.sensitivity, abs=1e-12)
    assert swapped.specificity == pytest.approx(base.specificity, abs=1e-12)
    assert swapped.f1 == pytest.approx(base.f1, abs=1e-12)


def test_zero_true_classes_excluded_and_noted():
    counts = np.array([[5, 1], [0, 0]], dtype=np.int64)
    report = macro_metrics(ConfusionMatrix(counts, labels=("A", "B")))
    assert report.excluded_from_sensitivity == ["B"]
    assert report.sensitivity == pytest.approx(5 / 6)


def test_all_zero_matrix_rejected():
    with pytest.raises(EmptyInputError):
        macro_metrics(ConfusionMatrix(np.zeros((2, 2), dtype=np.int64), labels=("A", "B")))


def test_dual_path_metrics_agree():
    # metrics from the cm equal metrics computed from raw pairs
    records = [
        _record(int(RNG.integers(0, NUM_CLASSES)), int(RNG.integers(0, NUM_CLASSES)), row=i)
        for i in range(300)
    ]
    log = PredictionLog(records=records)
    via_log = metrics_for_log(log, level="tile")
    pairs = [(r.true_label, r.predicted_label) for r in records]
    via_pairs = macro_metrics(ConfusionMatrix.from_pairs(pairs))
    assert via_log.as_row() == via_pairs.as_row()


# -- brier ---------------------------------------------------------------------


def test_brier_zero_for_perfect_one_hot():
    records = []
    for i in range(10):
        probs = np.zeros(NUM_CLASSES)
        probs[3] = 1.0
        records.append(PatchPrediction("s", "p", i, 0, CANONICAL_CLASSES[3],
                                       CANONICAL_CLASSES[3], tuple(probs)))
    assert brier_score(PredictionLog(records=records)) == 0.0


def test_brier_uniform_vector_closed_form():
    probs = tuple([1.0 / NUM_CLASSES] * NUM_CLASSES)
    rec = PatchPrediction("s", "p", 0, 0, CANONICAL_CLASSES[5], CANONICAL_CLASSES[0], probs)
    got = brier_score(PredictionLog(records=[rec]))
    assert got == pytest.approx(110 / 121, abs=1e-12)


def test_brier_rejects_unnormalized_vectors():
    bad = PatchPrediction("s", "p", 0, 0, "Non-Tumor", "Non-Tumor",
                          tuple([0.2] * NUM_CLASSES))
    with pytest.raises(ProbabilityValidationError):
        brier_score(PredictionLog(records=[bad]))


def test_brier_bounded_by_two():
    for _ in range(20):
        raw = RNG.random(NUM_CLASSES)
        probs = tuple(raw / raw.sum())
        pred = CANONICAL_CLASSES[int(np.argmax(probs))]
        rec = PatchPrediction("s", "p", 0, 0, CANONICAL_CLASSES[int(RNG.integers(NUM_CLASSES))],
                              pred, probs)
        score = brier_score(PredictionLog(records=[rec]))
        assert 0.0 <= score <= 2.0


# -- calibration ------------------------------------------------------------------


def test_single_confident_bin():
    records = []
    for i in range(5):
        probs = np.zeros(NUM_CLASSES)
        probs[0] = 1.0
        records.append(PatchPrediction("s", "p", i, 0, CANONICAL_CLASSES[0],
                                       CANONICAL_CLASSES[0], tuple(probs)))
    bins = calibration_curve(PredictionLog(records=records))
    assert bins[-1].count == 5
    assert bins[-1].mean_confidence == 1.0
    assert bins[-1].accuracy == 1.0
    assert sum(b.count for b in bins) == 5
    assert all(b.count == 0 for b in bins[:-1])


def test_bin_counts_partition_records():
    records = [
        _record(int(RNG.integers(NUM_CLASSES)), int(RNG.integers(NUM_CLASSES)),
                confidence=float(RNG.uniform(1 / NUM_CLASSES + 0.01, 0.999)), row=i)
        for i in range(400)
    ]
    bins = calibration_curve(PredictionLog(records=records))
    assert sum(b.count for b in bins) == 400


def test_synthetic_calibrated_generator_monte_carlo():
    # confidence p, correct with probability p -> per-bin |acc - conf| small
    n = 100_000
    rng = np.random.default_rng(5)
    records = []
    conf = rng.uniform(0.55, 0.99, size=n)
    correct = rng.random(n) < conf
    # two-class vectors embedded in the 11-class simplex
    for i in range(n):
        c = conf[i]
        probs = np.zeros(NUM_CLASSES)
        probs[0] = c
        probs[1] = 1 - c
        true_idx = 0 if correct[i] else 1
        records.append(PatchPrediction("s", "p", i, 0, CANONICAL_CLASSES[true_idx],
                                       CANONICAL_CLASSES[0], tuple(probs)))
    bins = calibration_curve(PredictionLog(records=records))
    for b in bins:
        if b.count > 1000:
            assert abs(b.accuracy - b.mean_confidence) < 0.02


# -- bootstrap ----------------------------------------------------------------------


def _bernoulli_log(p_correct, n, rng, patients=20):
    records = []
    for i in range(n):
        correct = rng.random() < p_correct
        pred = 0
        true = 0 if correct else 1
        records.append(_record(pred, true, patient=f"p{i % patients}", row=i))
    return PredictionLog(records=records)


def test_bootstrap_deterministic_under_seed():
    log = _bernoulli_log(0.8, 200, np.random.default_rng(1))
    a = bootstrap_ci(log, tile_accuracy, n_resamples=200, seed=9)
    b = bootstrap_ci(log, tile_accuracy, n_resamples=200, seed=9)
    c = bootstrap_ci(log, tile_accuracy, n_resamples=200, seed=10)
    assert (a.low, a.high) == (b.low, b.high)
    assert (a.low, a.high) != (c.low, c.high)


def test_bootstrap_constant_metric_zero_width():
    log = _bernoulli_log(1.0, 50, np.random.default_rng(2))
    ci = bootstrap_ci(log, tile_accuracy, n_resamples=100, seed=0)
    assert ci.low == ci.high == ci.point == 1.0


def test_bootstrap_contains_point_and_clamped_domain():
    log = _bernoulli_log(0.7, 120, np.random.default_rng(3))
    ci = bootstrap_ci(log, tile_accuracy, n_resamples=300, seed=4)
    assert ci.low <= ci.point <= ci.high
    assert 0.0 <= ci.low <= ci.high <= 1.0


def test_bootstrap_single_unit_warns():
    log = _bernoulli_log(0.9, 10, np.random.default_rng(4), patients=1)
    with pytest.warns(UserWarning):
        ci = bootstrap_ci(log, tile_accuracy, n_resamples=50, seed=0)
    assert ci.width == 0.0


def test_bootstrap_coverage_on_bernoulli():
    # record-level resampling of iid Bernoulli(0.7); nominal 95% coverage
    rng = np.random.default_rng(12)
    hits = 0
    trials = 500
    for _ in range(trials):
        log = _bernoulli_log(0.7, 120, rng)
        ci = bootstrap_ci(log, tile_accuracy, n_resamples=200,
                          seed=int(rng.integers(2**31)), unit="record")
        if ci.low <= 0.7 <= ci.high:
            hits += 1
    coverage = hits / trials
    assert abs(coverage - 0.95) < 0.03
