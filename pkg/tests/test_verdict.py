"""Majority voting against brute-force counting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from histocad.labels import CANONICAL_CLASSES, NUM_CLASSES
from histocad.trainkit.predlog import PatchPrediction, PredictionLog
from histocad.verdict import (
    DiagnosisResult,
    EmptyEvidenceError,
    class_proportions,
    diagnose,
    group_diagnose,
)

from oracles import mode_label

RNG = np.random.default_rng(31)


def _record(pred_label, true_label="Non-Tumor", slide="s1", patient="p1",
            row=0, col=0, pad=0.0, confidence=0.9):
    idx = CANONICAL_CLASSES.index(pred_label)
    probs = np.full(NUM_CLASSES, (1 - confidence) / (NUM_CLASSES - 1))
    probs[idx] = confidence
    return PatchPrediction(slide, patient, row, col, true_label, pred_label,
                           tuple(probs), pad_fraction=pad)


def _log(pred_labels, **kw):
    return PredictionLog(records=[_record(lab, row=i, **kw) for i, lab in enumerate(pred_labels)])


def test_proportions_single_class():
    props = class_proportions(["Breast Carcinoma"] * 100)
    assert props["Breast Carcinoma"] == 1.0
    assert sum(props.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(v == 0.0 for lab, v in props.items() if lab != "Breast Carcinoma")


def test_proportions_two_thirds():
    a, b = CANONICAL_CLASSES[0], CANONICAL_CLASSES[1]
    props = class_proportions([a, a, b])
    assert props[a] == pytest.approx(2 / 3)
    assert props[b] == pytest.approx(1 / 3)


def test_proportions_match_counter_oracle():
    labels = [CANONICAL_CLASSES[i] for i in RNG.integers(0, NUM_CLASSES, size=10_000)]
    props = class_proportions(labels)
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    for lab in CANONICAL_CLASSES:
        assert props[lab] == counts.get(lab, 0) / len(labels)


def test_proportions_empty_raises():
    with pytest.raises(EmptyEvidenceError):
        class_proportions([])


def test_paper_example_9531_of_10000():
    labels = ["Breast Carcinoma"] * 9531 + ["Non-Tumor"] * 469
    result = diagnose(_log(labels))
    assert result.final_label == "Breast Carcinoma"
    assert result.certainty == pytest.approx(0.9531, abs=1e-12)
    assert result.n == 10000 and not result.tie


def test_exact_tie_breaks_canonically_and_flags():
    a, b = CANONICAL_CLASSES[3], CANONICAL_CLASSES[1]  # b earlier in canonical order
    result = diagnose(_log([a, b] * 25))
    assert result.final_label == b
    assert result.tie


def test_certainty_at_least_one_eleventh():
    for _ in range(50):
        labels = [CANONICAL_CLASSES[i] for i in RNG.integers(0, NUM_CLASSES, size=int(RNG.integers(1, 40)))]
        assert diagnose(_log(labels)).certainty >= 1 / NUM_CLASSES - 1e-12


def test_diagnose_matches_mode_oracle_on_tie_free_logs():
    trials = 0
    while trials < 1000:
        labels = [CANONICAL_CLASSES[i] for i in RNG.integers(0, NUM_CLASSES, size=int(RNG.integers(1, 30)))]
        result = diagnose(_log(labels))
        if result.tie:
            continue
        assert result.final_label == mode_label(labels)
        trials += 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=NUM_CLASSES - 1), min_size=1, max_size=40),
       st.randoms())
def test_permutation_and_duplication_invariance(idxs, rnd):
    labels = [CANONICAL_CLASSES[i] for i in idxs]
    base = diagnose(_log(labels))
    shuffled = list(labels)
    rnd.shuffle(shuffled)
    perm = diagnose(_log(shuffled))
    assert perm.final_label == base.final_label
    assert perm.proportions == base.proportions
    doubled = diagnose(_log(labels + labels))
    assert doubled.final_label == base.final_label
    assert doubled.proportions == pytest.approx(base.proportions)


def test_adding_one_patch_moves_proportions_little():
    labels = [CANONICAL_CLASSES[i] for i in RNG.integers(0, NUM_CLASSES, size=20)]
    base = diagnose(_log(labels)).proportions
    grown = diagnose(_log(labels + ["Non-Tumor"])).proportions
    for lab in CANONICAL_CLASSES:
        assert abs(grown[lab] - base[lab]) <= 1 / 21 + 1e-12


def test_padded_records_excluded_by_default():
    records = [_record("Breast Carcinoma", row=i) for i in range(3)]
    records.append(_record("Non-Tumor", row=9, pad=0.9))
    result = diagnose(PredictionLog(records=records))
    assert result.n == 3
    assert result.proportions["Non-Tumor"] == 0.0
    kept = diagnose(PredictionLog(records=records), exclude_padded=False)
    assert kept.n == 4


def test_empty_scope_raises():
    with pytest.raises(EmptyEvidenceError):
        diagnose(PredictionLog(records=[]))
    padded_only = PredictionLog(records=[_record("Non-Tumor", pad=0.9)])
    with pytest.raises(EmptyEvidenceError):
        diagnose(padded_only)


def test_scope_filters_by_slide_and_patient():
    records = [_record("Breast Carcinoma", slide="s1", patient="p1", row=i) for i in range(3)]
    records += [_record("Non-Tumor", slide="s2", patient="p2", row=i) for i in range(5)]
    log = PredictionLog(records=records)
    assert diagnose(log, scope="slide", unit="s1").final_label == "Breast Carcinoma"
    assert diagnose(log, scope="patient", unit="p2").final_label == "Non-Tumor"
    by_slide = group_diagnose(log, level="slide")
    assert set(by_slide) == {"s1", "s2"}
    assert by_slide["s2"].certainty == 1.0


def test_table_lists_nonzero_descending():
    labels = ["Breast Carcinoma"] * 6 + ["Non-Tumor"] * 3 + ["Hepatocarcinoma"]
    table = diagnose(_log(labels)).table()
    assert table[0] == ("Breast Carcinoma", 0.6)
    assert [row[0] for row in table] == ["Breast Carcinoma", "Non-Tumor", "Hepatocarcinoma"]
    assert all(p > 0 for _, p in table)
