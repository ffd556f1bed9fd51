from __future__ import annotations

from pathlib import Path

import pytest

from revcurate.framework import CRITERIA
from revcurate.parsing import Judgment
from revcurate.stats import (
    StatsError,
    build_report,
    category_distribution,
    distribution_csv,
    histogram_csv,
    render_means_table,
    report_to_json,
    score_histogram,
    score_means_by_category,
)

GOLDEN = Path(__file__).parent / "fixtures" / "golden"


def _judgment(types, natures, civility, relevance, clarity, conciseness):
    return Judgment(
        reference_comment="ref",
        types=frozenset(types),
        natures=frozenset(natures),
        civility=civility,
        relevance=relevance,
        clarity=clarity,
        conciseness=conciseness,
        rationale="why",
    )


@pytest.fixture()
def hand_fixture():
    # five hand-labeled samples; expected means worked out below by hand
    return {
        "s1": _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 8, 6, 7),
        "s2": _judgment({"Bugfix"}, {"Prescriptive"}, "Civil", 6, 7, 5),
        "s3": _judgment({"Refactoring", "Bugfix"}, {"Descriptive"}, "Uncivil", 4, 3, 2),
        "s4": _judgment({"Testing"}, {"Clarification"}, "Civil", 10, 9, 9),
        "s5": _judgment({"Other"}, {"Other", "Prescriptive"}, "Civil", 2, 5, 4),
    }


def test_all_single_label_distribution():
    judgments = {f"s{i}": _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 5, 5, 5) for i in range(4)}
    counts, percentages = category_distribution(judgments)
    assert percentages[("Type", "Refactoring")] == 100.0
    assert all(
        percentages[key] == 0.0
        for key in percentages
        if key not in (("Type", "Refactoring"), ("Nature", "Prescriptive"), ("Civility", "Civil"))
    )


def test_hand_fixture_percentages(hand_fixture):
    counts, percentages = category_distribution(hand_fixture)
    assert counts[("Type", "Refactoring")] == 2
    assert percentages[("Type", "Refactoring")] == 40.0
    assert percentages[("Type", "Bugfix")] == 40.0
    assert percentages[("Type", "Testing")] == 20.0
    assert percentages[("Type", "Other")] == 20.0
    assert percentages[("Nature", "Prescriptive")] == 60.0
    assert percentages[("Civility", "Civil")] == 80.0
    # multi-label: percentages may exceed 100 in sum
    assert sum(percentages[k] for k in percentages if k[0] == "Type") > 100.0


def test_hand_fixture_means_exact(hand_fixture):
    means, overall = score_means_by_category(hand_fixture)
    tol = 1e-12
    assert abs(means[("Type", "Refactoring")]["relevance"] - 6.0) < tol  # (8+4)/2
    assert abs(means[("Type", "Refactoring")]["clarity"] - 4.5) < tol  # (6+3)/2
    assert abs(means[("Type", "Bugfix")]["relevance"] - 5.0) < tol  # (6+4)/2
    assert abs(means[("Type", "Bugfix")]["conciseness"] - 3.5) < tol  # (5+2)/2
    assert abs(means[("Nature", "Prescriptive")]["relevance"] - 16 / 3) < tol  # (8+6+2)/3
    assert abs(means[("Nature", "Prescriptive")]["conciseness"] - 16 / 3) < tol  # (7+5+4)/3
    assert abs(means[("Civility", "Civil")]["relevance"] - 6.5) < tol  # (8+6+10+2)/4
    assert abs(means[("Civility", "Civil")]["clarity"] - 6.75) < tol
    assert abs(means[("Civility", "Uncivil")]["clarity"] - 3.0) < tol  # s3 only
    assert abs(overall["relevance"] - 6.0) < tol  # 30/5
    assert abs(overall["clarity"] - 6.0) < tol
    assert abs(overall["conciseness"] - 27 / 5) < tol


def test_twenty_sample_enumeration():
    # 20 hand-labeled samples: 12 {Refactoring}, 5 {Bugfix}, 3 {Refactoring, Testing}
    judgments = {}
    for i in range(12):
        judgments[f"r{i}"] = _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 5, 5, 5)
    for i in range(5):
        judgments[f"b{i}"] = _judgment({"Bugfix"}, {"Descriptive"}, "Civil", 5, 5, 5)
    for i in range(3):
        judgments[f"t{i}"] = _judgment({"Refactoring", "Testing"}, {"Clarification"}, "Uncivil", 5, 5, 5)
    counts, percentages = category_distribution(judgments)
    assert counts[("Type", "Refactoring")] == 15  # 12 + 3 multi-label
    assert percentages[("Type", "Refactoring")] == 75.0
    assert counts[("Type", "Bugfix")] == 5 and percentages[("Type", "Bugfix")] == 25.0
    assert counts[("Type", "Testing")] == 3 and percentages[("Type", "Testing")] == 15.0
    assert percentages[("Civility", "Uncivil")] == 15.0


def test_zero_member_subcategory_absent_not_zero(hand_fixture):
    means, _ = score_means_by_category(hand_fixture)
    assert means[("Type", "Logging")]["relevance"] is None
    assert means[("Type", "Documentation")]["clarity"] is None


def test_all_scores_equal_seven():
    judgments = {f"s{i}": _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 7, 7, 7) for i in range(3)}
    means, overall = score_means_by_category(judgments)
    assert means[("Type", "Refactoring")]["relevance"] == 7.0
    assert overall == {"relevance": 7.0, "clarity": 7.0, "conciseness": 7.0}


def test_uniform_histogram():
    judgments = {
        f"s{score}": _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", score, score, score)
        for score in range(1, 11)
    }
    for criterion in CRITERIA:
        assert score_histogram(judgments, criterion) == [1] * 10


def test_histogram_mass_conservation(judged200):
    for criterion in CRITERIA:
        assert sum(score_histogram(judged200, criterion)) == len(judged200)


def test_engineered_bimodal_histogram():
    judgments = {}
    for i in range(12):
        judgments[f"a{i}"] = _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 2, 2, 2)
    for i in range(8):
        judgments[f"b{i}"] = _judgment({"Bugfix"}, {"Descriptive"}, "Civil", 9, 9, 9)
    hist = score_histogram(judgments, "relevance")
    assert hist[1] == 12 and hist[8] == 8
    assert sum(hist) == 20


def test_unknown_criterion():
    with pytest.raises(StatsError):
        score_histogram({"s": _judgment({"Refactoring"}, {"Prescriptive"}, "Civil", 5, 5, 5)}, "tone")


def test_empty_corpus_is_error():
    with pytest.raises(StatsError):
        category_distribution({})


def test_civility_partition_mean_consistency(judged200):
    # Civil/Uncivil partition the corpus: overall mean must equal the
    # count-weighted combination of the two civility means.
    report = build_report(judged200)
    civil_count = report.counts[("Civility", "Civil")]
    uncivil_count = report.counts[("Civility", "Uncivil")]
    assert civil_count + uncivil_count == report.total
    for criterion in CRITERIA:
        civil_mean = report.means[("Civility", "Civil")][criterion]
        uncivil_mean = report.means[("Civility", "Uncivil")][criterion]
        weighted = (civil_mean * civil_count + uncivil_mean * uncivil_count) / report.total
        assert abs(weighted - report.overall_means[criterion]) < 1e-9


def test_report_layout_golden(judged200):
    table = render_means_table(build_report(judged200))
    assert table == (GOLDEN / "stats_table.txt").read_text(encoding="utf-8")


def test_report_json_and_csv(judged200):
    report = build_report(judged200)
    payload = report_to_json(report)
    assert payload["total"] == 200
    assert set(payload["histograms"]) == set(CRITERIA)
    csv_text = histogram_csv(report, "relevance")
    assert csv_text.startswith("score,count\n1,")
    assert len(csv_text.strip().splitlines()) == 11
    dist = distribution_csv(report)
    assert dist.splitlines()[0] == "category,subcategory,count,percentage"
    assert len(dist.strip().splitlines()) == 1 + 12  # 6 + 4 + 2 subcategories
