from __future__ import annotations

import pytest

import fixture_gen
from revcurate.curation import (
    CurationReport,
    MissingJudgment,
    curate,
    curated_comments_by_id,
    evolution_report,
    filter_irrelevant,
    read_curated,
    render_report,
    report_to_json,
    write_curated,
)
from revcurate.judge import JudgeConfig, MockBackend
from revcurate.parsing import Judgment, PostJudgment


def _judgment(relevance, clarity=5, conciseness=5, types=("Refactoring",),
              natures=("Prescriptive",), civility="Civil"):
    return Judgment(
        reference_comment="ref",
        types=frozenset(types),
        natures=frozenset(natures),
        civility=civility,
        relevance=relevance,
        clarity=clarity,
        conciseness=conciseness,
        rationale="r",
    )


def test_threshold_is_strict_less_than(corpus200):
    judgments = {s.id: _judgment(relevance=3 if s.id == "000000" else 4) for s in corpus200}
    outcome = filter_irrelevant(corpus200, judgments, threshold=4)
    assert outcome.removed.ids() == ["000000"]
    assert "000001" in outcome.kept


def test_fixture_filter_counts(corpus200, judged200):
    outcome = filter_irrelevant(corpus200, judged200, threshold=4)
    assert len(outcome.kept) == 189
    assert len(outcome.removed) == 11
    assert tuple(outcome.removed_ids) == tuple(sorted(fixture_gen.REMOVED_IDS))
    assert len(outcome.kept) + len(outcome.removed) == len(corpus200)
    # kept preserves corpus order
    assert outcome.kept.ids() == [s.id for s in corpus200 if s.id not in fixture_gen.REMOVED_IDS]


def test_filter_idempotent(corpus200, judged200):
    once = filter_irrelevant(corpus200, judged200)
    twice = filter_irrelevant(once.kept, judged200)
    assert twice.kept.ids() == once.kept.ids()
    assert len(twice.removed) == 0


def test_missing_judgment_is_error(corpus200, judged200):
    partial = dict(judged200)
    del partial["000005"]
    with pytest.raises(MissingJudgment) as err:
        filter_irrelevant(corpus200, partial)
    assert err.value.sample_id == "000005"


@pytest.fixture(scope="module")
def curated_run(corpus200, judged200, mock_dir):
    outcome = filter_irrelevant(corpus200, judged200)
    config = JudgeConfig(max_retries=1, max_parallel=4, backoff_base=0.0)
    return outcome, curate(outcome.kept, judged200, MockBackend(mock_dir), config)


def test_curate_bookkeeping(corpus200, curated_run):
    outcome, run = curated_run
    assert len(run.curated) + len(outcome.removed) + len(run.quarantined) == len(corpus200)
    assert len(run.quarantined) == 0
    # bijection on kept ids
    assert sorted(c.id for c in run.curated) == outcome.kept.ids()


def test_reformulation_example_row1(curated_run):
    _, run = curated_run
    by_id = {c.id: c for c in run.curated}
    sample = by_id["000001"]
    assert sample.original_comment.startswith("you need to use `list_delete`")
    assert sample.reformulated_comment == fixture_gen.REFORMULATED_1


def test_reformulation_example_row2_quotes_stripped(curated_run):
    _, run = curated_run
    by_id = {c.id: c for c in run.curated}
    assert by_id["000002"].reformulated_comment == fixture_gen.REFORMULATED_2


def test_curated_civility_all_civil(curated_run):
    _, run = curated_run
    assert all(c.post_judgment.civility == "Civil" for c in run.curated)


def test_carried_relevance_copied(curated_run, judged200):
    _, run = curated_run
    for sample in run.curated:
        assert sample.carried_relevance == judged200[sample.id].relevance
        assert sample.carried_relevance >= 4


def test_curated_records_have_no_relevance_in_post_judgment(tmp_path, curated_run):
    _, run = curated_run
    path = tmp_path / "curated.jsonl"
    write_curated(run.curated, path)
    import json

    for line in path.read_text(encoding="utf-8").splitlines():
        record = json.loads(line)
        assert "relevance" not in record["post_judgment"]
        assert set(record["post_judgment"]) == {"natures", "civility", "clarity", "conciseness"}
    roundtrip = read_curated(path)
    assert roundtrip == sorted(run.curated, key=lambda c: c.id)


def test_curate_empty_corpus(corpus200, judged200, mock_dir):
    empty = corpus200.subset([])
    run = curate(empty, judged200, MockBackend(mock_dir), JudgeConfig(backoff_base=0.0))
    assert run.curated == [] and run.quarantined == []


def test_curate_quarantines_failures(corpus200, judged200, tmp_path):
    fixture_gen.write_mock_fixtures(tmp_path, size=3)
    (tmp_path / "000002.reformulation.txt").unlink()
    subset = corpus200.subset(["000000", "000001", "000002"])
    run = curate(subset, judged200, MockBackend(tmp_path), JudgeConfig(max_retries=0, backoff_base=0.0))
    assert sorted(c.id for c in run.curated) == ["000000", "000001"]
    assert [f.id for f in run.quarantined] == ["000002"]


# --- evolution report --------------------------------------------------------


def _curated(sample_id, clarity, conciseness, natures=("Prescriptive",), civility="Civil"):
    from revcurate.curation import CuratedSample

    return CuratedSample(
        id=sample_id,
        original_comment="orig",
        reformulated_comment="ref",
        carried_relevance=5,
        post_judgment=PostJudgment(
            natures=frozenset(natures), civility=civility, clarity=clarity, conciseness=conciseness
        ),
    )


def test_evolution_identity_deltas_zero():
    judgments = {
        "a": _judgment(5, clarity=6, conciseness=7),
        "b": _judgment(5, clarity=8, conciseness=9),
    }
    curated = [_curated("a", 6, 7), _curated("b", 8, 9)]
    report = evolution_report(judgments, curated)
    assert report.overall["clarity"].delta == 0.0
    assert report.overall["conciseness"].delta == 0.0


def test_evolution_hand_arithmetic():
    # five samples, hand-set scores
    judgments = {
        "a": _judgment(5, clarity=2, conciseness=4, types=("Refactoring",)),
        "b": _judgment(5, clarity=4, conciseness=6, types=("Refactoring",)),
        "c": _judgment(5, clarity=6, conciseness=2, types=("Bugfix",)),
        "d": _judgment(5, clarity=8, conciseness=10, types=("Bugfix",), civility="Uncivil"),
        "e": _judgment(5, clarity=10, conciseness=8, types=("Refactoring", "Bugfix")),
    }
    curated = [
        _curated("a", 9, 8),
        _curated("b", 7, 6),
        _curated("c", 8, 9),
        _curated("d", 10, 7),
        _curated("e", 6, 10),
    ]
    report = evolution_report(judgments, curated)

    # overall: before clarity (2+4+6+8+10)/5 = 6, after (9+7+8+10+6)/5 = 8
    assert abs(report.overall["clarity"].before - 6.0) < 1e-12
    assert abs(report.overall["clarity"].after - 8.0) < 1e-12
    assert abs(report.overall["clarity"].delta - 2.0) < 1e-12
    # conciseness: before (4+6+2+10+8)/5 = 6, after (8+6+9+7+10)/5 = 8
    assert abs(report.overall["conciseness"].delta - 2.0) < 1e-12

    # Refactoring grouping (types are not re-judged): a, b, e
    refactoring = report.subcategories[("Type", "Refactoring")]
    assert abs(refactoring["clarity"].before - (2 + 4 + 10) / 3) < 1e-12
    assert abs(refactoring["clarity"].after - (9 + 7 + 6) / 3) < 1e-12

    # post-curation civility is all Civil: Uncivil after-mean absent
    uncivil = report.subcategories[("Civility", "Uncivil")]
    assert uncivil["clarity"].after is None
    assert uncivil["clarity"].before == 8.0  # sample d
    assert report.civility_shift["Uncivil"].count_before == 1
    assert report.civility_shift["Uncivil"].count_after == 0
    assert report.civility_shift["Civil"].pct_after == 100.0


def test_evolution_report_bookkeeping_guard():
    with pytest.raises(ValueError):
        CurationReport(
            total_in=5,
            kept=3,
            removed_ids=("x",),
            quarantined=0,  # 3 + 1 + 0 != 5
            overall={},
            subcategories={},
            nature_shift={},
            civility_shift={},
        )


def test_report_render_and_json(corpus200, judged200, curated_run):
    outcome, run = curated_run
    report = evolution_report(
        judged200, run.curated, removed_ids=outcome.removed_ids, quarantined=0
    )
    payload = report_to_json(report)
    assert payload["total_in"] == 200
    assert payload["kept"] == 189
    assert payload["removed"]["count"] == 11
    text = render_report(report)
    assert "Average" in text and "↑" in text
    # every curated nature judgment is prescriptive-bearing in the fixture plan
    assert payload["civility_shift"]["Civil"]["pct_after"] == 100.0


def test_curated_comments_by_id(curated_run):
    _, run = curated_run
    table = curated_comments_by_id(run.curated)
    assert table["000001"] == fixture_gen.REFORMULATED_1
    assert len(table) == len(run.curated)
