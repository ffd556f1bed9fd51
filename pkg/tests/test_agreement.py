from __future__ import annotations

import random

import pytest

from oracles import kappa_confusion_oracle
from revcurate.agreement import (
    AgreementError,
    AnnotationLabels,
    AnnotationRecord,
    ConsensusRecord,
    CoverageMismatch,
    cohen_kappa,
    compare_dimensions,
    find_conflicts,
    kappa_report,
    labels_from_judgment,
    render_kappa_report,
)

# Frozen multi-class fixtures; expected values computed with the
# confusion-matrix oracle and pinned here.
K1_A = [0, 1, 2, 0, 1, 2, 0, 0, 1, 2, 2, 1]
K1_B = [0, 1, 2, 1, 1, 2, 0, 2, 1, 2, 0, 1]
K1_SPACE = (0, 1, 2)
K1_EXPECTED = 0.625
K1_EXPECTED_LINEAR = 0.5161290322580646

K2_A = ["w", "x", "y", "z", "w", "x", "y", "z", "w", "x", "y", "z", "w", "w", "z", "y"]
K2_B = ["w", "x", "y", "y", "w", "z", "y", "z", "x", "x", "y", "z", "w", "x", "z", "y"]
K2_SPACE = ("w", "x", "y", "z")
K2_EXPECTED = 0.6683937823834197
K2_EXPECTED_LINEAR = 0.7515527950310559

K3_A = [1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 3, 3, 2, 4]
K3_B = [1, 3, 3, 4, 4, 5, 4, 2, 2, 1, 3, 4, 2, 5]
K3_SPACE = (1, 2, 3, 4, 5)
K3_EXPECTED = 0.5483870967741936
K3_EXPECTED_LINEAR = 0.75


def test_perfect_agreement_is_one():
    assert cohen_kappa([1, 2, 1, 2], [1, 2, 1, 2], (1, 2)) == pytest.approx(1.0, abs=1e-12)


def test_hand_binary_example_zero():
    # p_o = 0.5, p_e = 0.5 -> kappa = 0
    assert cohen_kappa([1, 1, 0, 0], [1, 0, 1, 0], (0, 1)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "a,b,space,expected,expected_linear",
    [
        (K1_A, K1_B, K1_SPACE, K1_EXPECTED, K1_EXPECTED_LINEAR),
        (K2_A, K2_B, K2_SPACE, K2_EXPECTED, K2_EXPECTED_LINEAR),
        (K3_A, K3_B, K3_SPACE, K3_EXPECTED, K3_EXPECTED_LINEAR),
    ],
)
def test_multiclass_fixtures_against_oracle(a, b, space, expected, expected_linear):
    assert cohen_kappa(a, b, space) == pytest.approx(expected, abs=1e-9)
    assert cohen_kappa(a, b, space) == pytest.approx(
        kappa_confusion_oracle(a, b, space), abs=1e-9
    )
    assert cohen_kappa(a, b, space, "linear") == pytest.approx(expected_linear, abs=1e-9)
    assert cohen_kappa(a, b, space, "linear") == pytest.approx(
        kappa_confusion_oracle(a, b, space, "linear"), abs=1e-9
    )


def test_degenerate_single_label_convention():
    assert cohen_kappa(["x", "x"], ["x", "x"], ("x", "y")) == 1.0
    assert cohen_kappa(["x"], ["x"], ("x",)) == 1.0


def test_errors():
    with pytest.raises(AgreementError):
        cohen_kappa([1], [1, 2], (1, 2))
    with pytest.raises(AgreementError):
        cohen_kappa([], [], (1, 2))
    with pytest.raises(AgreementError):
        cohen_kappa([3], [1], (1, 2))
    with pytest.raises(AgreementError):
        cohen_kappa([1], [1], (1, 2), weighting="quadratic")


def test_random_symmetry_and_permutation_invariance():
    rng = random.Random(2024)
    for trial in range(100):
        k = rng.randint(2, 5)
        n = rng.randint(2, 40)
        space = tuple(range(k))
        a = [rng.randrange(k) for _ in range(n)]
        b = [rng.randrange(k) for _ in range(n)]
        weighting = "linear" if trial % 2 else "none"
        base = cohen_kappa(a, b, space, weighting)
        assert cohen_kappa(b, a, space, weighting) == pytest.approx(base, abs=1e-12)
        order = list(range(n))
        rng.shuffle(order)
        assert cohen_kappa(
            [a[i] for i in order], [b[i] for i in order], space, weighting
        ) == pytest.approx(base, abs=1e-12)
        assert -1.0 <= base <= 1.0 + 1e-12


def test_kappa_self_agreement_with_two_labels():
    rng = random.Random(7)
    for _ in range(20):
        seq = [rng.randrange(3) for _ in range(15)]
        if len(set(seq)) < 2:
            continue
        assert cohen_kappa(seq, seq, (0, 1, 2)) == pytest.approx(1.0, abs=1e-12)


def test_unweighted_equals_linear_on_binary():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randint(1, 30)
        a = [rng.randrange(2) for _ in range(n)]
        b = [rng.randrange(2) for _ in range(n)]
        assert cohen_kappa(a, b, (0, 1)) == pytest.approx(
            cohen_kappa(a, b, (0, 1), "linear"), abs=1e-12
        )


# --- conflicts ---------------------------------------------------------------


def _labels(**overrides) -> AnnotationLabels:
    base = dict(
        types=frozenset({"Refactoring"}),
        natures=frozenset({"Prescriptive"}),
        civility="Civil",
        relevance=7,
        clarity=7,
        conciseness=7,
    )
    base.update(overrides)
    return AnnotationLabels(**base)


def _records(annotator, labels_by_sample):
    return [
        AnnotationRecord(sample_id=sid, annotator_id=annotator, labels=labels)
        for sid, labels in labels_by_sample.items()
    ]


def test_identical_annotations_no_conflicts():
    table = {f"{i:06d}": _labels() for i in range(10)}
    assert find_conflicts(_records("a", table), _records("b", table)) == []


def test_single_civility_conflict():
    base = {f"{i:06d}": _labels() for i in range(5)}
    other = dict(base)
    other["000003"] = _labels(civility="Uncivil")
    conflicts = find_conflicts(_records("a", base), _records("b", other))
    assert len(conflicts) == 1
    assert conflicts[0].sample_id == "000003"
    assert conflicts[0].dimension == "civility"
    assert (conflicts[0].value_a, conflicts[0].value_b) == ("Civil", "Uncivil")


def test_engineered_disagreements_found_exactly():
    base = {f"{i:06d}": _labels() for i in range(10)}
    other = dict(base)
    other["000001"] = _labels(relevance=3)
    other["000004"] = _labels(types=frozenset({"Bugfix"}))
    other["000007"] = _labels(civility="Uncivil")
    conflicts = find_conflicts(_records("a", base), _records("b", other))
    assert [(c.sample_id, c.dimension) for c in conflicts] == [
        ("000001", "relevance"),
        ("000004", "types"),
        ("000007", "civility"),
    ]


def test_coverage_mismatch_lists_ids():
    base = {f"{i:06d}": _labels() for i in range(3)}
    partial = {sid: base[sid] for sid in ("000000", "000002")}
    with pytest.raises(CoverageMismatch) as err:
        find_conflicts(_records("a", base), _records("b", partial))
    assert err.value.missing_from_b == ["000001"]


def test_compare_dimensions_order():
    a = _labels()
    b = _labels(civility="Uncivil", clarity=3)
    assert compare_dimensions(a, b) == ["civility", "clarity"]


# --- kappa report --------------------------------------------------------------


def test_kappa_report_perfect_on_identical(judged200):
    ids = sorted(judged200)[:10]
    consensus = [
        ConsensusRecord(sample_id=sid, labels=labels_from_judgment(judged200[sid]))
        for sid in ids
    ]
    report = kappa_report(consensus, {sid: judged200[sid] for sid in ids})
    assert report["civility"] == pytest.approx(1.0, abs=1e-12)
    assert report["type"]["macro"] == pytest.approx(1.0, abs=1e-12)
    assert report["nature"]["macro"] == pytest.approx(1.0, abs=1e-12)
    for criterion in ("relevance", "clarity", "conciseness"):
        assert report[criterion]["unweighted"] == pytest.approx(1.0, abs=1e-12)
        assert report[criterion]["linear"] == pytest.approx(1.0, abs=1e-12)


def test_kappa_report_civility_disagreements_match_oracle(judged200):
    ids = sorted(judged200)[:10]
    human_civility = []
    consensus = []
    for position, sid in enumerate(ids):
        labels = labels_from_judgment(judged200[sid])
        if position in (2, 6):  # two engineered civility flips
            flipped = "Uncivil" if labels.civility == "Civil" else "Civil"
            labels = AnnotationLabels(
                types=labels.types,
                natures=labels.natures,
                civility=flipped,
                relevance=labels.relevance,
                clarity=labels.clarity,
                conciseness=labels.conciseness,
            )
        human_civility.append(labels.civility)
        consensus.append(ConsensusRecord(sample_id=sid, labels=labels))
    report = kappa_report(consensus, {sid: judged200[sid] for sid in ids})
    llm_civility = [judged200[sid].civility for sid in ids]
    expected = kappa_confusion_oracle(human_civility, llm_civility, ("Civil", "Uncivil"))
    assert report["civility"] == pytest.approx(expected, abs=1e-9)


def test_kappa_report_empty_overlap(judged200):
    consensus = [ConsensusRecord(sample_id="zzzzzz", labels=_labels())]
    with pytest.raises(AgreementError):
        kappa_report(consensus, judged200)


def test_render_kappa_report(judged200):
    ids = sorted(judged200)[:10]
    consensus = [
        ConsensusRecord(sample_id=sid, labels=labels_from_judgment(judged200[sid]))
        for sid in ids
    ]
    text = render_kappa_report(kappa_report(consensus, judged200))
    assert "civility" in text and "linear" in text
