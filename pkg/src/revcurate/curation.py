"""Two-step curation: relevance filtering, then reformulation + re-evaluation.

Filtering drops every comment whose relevance score is strictly below the
threshold (default 4); relevance is a property of the comment's content, so
it is carried over unchanged instead of being re-judged. Kept comments are
reformulated and re-evaluated on the remaining dimensions.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import jsonl
from .corpus import Corpus, ReviewSample
from .framework import CATEGORIES, CIVILITY_LABELS, NATURE_LABELS
from .judge import (
    Backend,
    JudgeConfig,
    JudgeError,
    JudgeFailure,
    build_reevaluation_prompt,
    build_reformulation_prompt,
    complete,
)
from .parsing import (
    Judgment,
    JudgmentParseError,
    MissingReformulation,
    PostJudgment,
    parse_post_judgment,
    parse_reformulation,
    post_judgment_from_record,
    post_judgment_to_record,
)

DEFAULT_THRESHOLD = 4


class MissingJudgment(KeyError):
    def __init__(self, sample_id: str):
        super().__init__(sample_id)
        self.sample_id = sample_id

    def __str__(self) -> str:
        return f"sample {self.sample_id} has no judgment"


@dataclass(frozen=True)
class CuratedSample:
    id: str
    original_comment: str
    reformulated_comment: str
    carried_relevance: int
    post_judgment: PostJudgment


@dataclass
class FilterOutcome:
    kept: Corpus
    removed: Corpus
    threshold: int

    @property
    def removed_ids(self) -> list[str]:
        return self.removed.ids()


def filter_irrelevant(
    corpus: Corpus,
    judgments: Mapping[str, Judgment],
    threshold: int = DEFAULT_THRESHOLD,
) -> FilterOutcome:
    """Split the corpus into kept/removed at ``relevance < threshold`` (strict)."""
    kept: list[ReviewSample] = []
    removed: list[ReviewSample] = []
    for sample in corpus:
        judgment = judgments.get(sample.id)
        if judgment is None:
            raise MissingJudgment(sample.id)
        if judgment.relevance < threshold:
            removed.append(sample)
        else:
            kept.append(sample)
    return FilterOutcome(
        kept=Corpus(kept, corpus.provenance),
        removed=Corpus(removed, corpus.provenance),
        threshold=threshold,
    )


@dataclass
class CurationRun:
    curated: list[CuratedSample]
    quarantined: list[JudgeFailure]


def curate(
    kept: Corpus,
    judgments: Mapping[str, Judgment],
    backend: Backend,
    config: JudgeConfig,
    sleep: Callable[[float], None] = time.sleep,
) -> CurationRun:
    """Reformulate every kept comment and re-evaluate the result.

    The re-evaluation reuses the evaluation prompt with the reformulated
    comment substituted and the relevance section removed; the original
    relevance score is carried over. Samples whose reformulation or
    re-evaluation fails are quarantined, never silently dropped.
    """
    for sample in kept:
        if sample.id not in judgments:
            raise MissingJudgment(sample.id)

    def curate_one(sample: ReviewSample) -> CuratedSample | JudgeFailure:
        attempts = 0
        try:
            attempts += 1
            reform_response = complete(backend, build_reformulation_prompt(sample), config, sleep)
            reformulation = parse_reformulation(reform_response.raw_text)
            attempts += 1
            post_response = complete(
                backend, build_reevaluation_prompt(sample, reformulation.text), config, sleep
            )
            post = parse_post_judgment(post_response.raw_text)
        except (JudgeError, JudgmentParseError, MissingReformulation) as exc:
            return JudgeFailure(id=sample.id, error=str(exc), attempts=attempts)
        return CuratedSample(
            id=sample.id,
            original_comment=sample.comment,
            reformulated_comment=reformulation.text,
            carried_relevance=judgments[sample.id].relevance,
            post_judgment=post,
        )

    samples = list(kept)
    with ThreadPoolExecutor(max_workers=config.max_parallel) as pool:
        outcomes = list(pool.map(curate_one, samples))

    run = CurationRun(curated=[], quarantined=[])
    for outcome in outcomes:
        if isinstance(outcome, JudgeFailure):
            run.quarantined.append(outcome)
        else:
            run.curated.append(outcome)
    return run


def curated_comments_by_id(curated: Iterable[CuratedSample]) -> dict[str, str]:
    return {c.id: c.reformulated_comment for c in curated}


def write_curated(curated: Iterable[CuratedSample], path: str | Path) -> int:
    records = (
        {
            "id": c.id,
            "comment_original": c.original_comment,
            "comment_curated": c.reformulated_comment,
            "carried_relevance": c.carried_relevance,
            "post_judgment": post_judgment_to_record(c.post_judgment),
        }
        for c in sorted(curated, key=lambda c: c.id)
    )
    return jsonl.dump_jsonl(records, path)


def read_curated(path: str | Path) -> list[CuratedSample]:
    curated = []
    for record in jsonl.iter_jsonl(path):
        curated.append(
            CuratedSample(
                id=record["id"],
                original_comment=record["comment_original"],
                reformulated_comment=record["comment_curated"],
                carried_relevance=record["carried_relevance"],
                post_judgment=post_judgment_from_record(record["post_judgment"]),
            )
        )
    return curated


# --- evolution report -------------------------------------------------------

REPORT_CRITERIA = ("clarity", "conciseness")


@dataclass
class MeanShift:
    before: float | None
    after: float | None

    @property
    def delta(self) -> float | None:
        if self.before is None or self.after is None:
            return None
        return self.after - self.before


@dataclass
class CategoryShift:
    count_before: int
    pct_before: float
    count_after: int
    pct_after: float


@dataclass
class CurationReport:
    total_in: int
    kept: int
    removed_ids: tuple[str, ...]
    quarantined: int
    # criterion -> overall MeanShift
    overall: dict[str, MeanShift]
    # (category, subcategory) -> criterion -> MeanShift
    subcategories: dict[tuple[str, str], dict[str, MeanShift]]
    # subcategory -> CategoryShift, for the re-judged categories
    nature_shift: dict[str, CategoryShift]
    civility_shift: dict[str, CategoryShift]

    def __post_init__(self):
        if self.total_in != len(self.removed_ids) + self.kept + self.quarantined:
            raise ValueError("curation bookkeeping does not add up")


def _mean(values: list[int]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def evolution_report(
    judgments: Mapping[str, Judgment],
    curated: list[CuratedSample],
    removed_ids: Iterable[str] = (),
    quarantined: int = 0,
) -> CurationReport:
    """Before/after means per subcategory and overall, plus label shifts.

    Before means come from the original judgments grouped by their original
    labels; after means come from curated samples grouped by post-curation
    labels (original types for the Type category, which is not re-judged).
    """
    removed = tuple(sorted(removed_ids))
    originals = [judgments[c.id] for c in curated if c.id in judgments]
    missing = [c.id for c in curated if c.id not in judgments]
    if missing:
        raise MissingJudgment(missing[0])

    def before_values(category: str, subcat: str, criterion: str) -> list[int]:
        values = []
        for judgment in judgments.values():
            if _carries(judgment, category, subcat):
                values.append(judgment.score(criterion))
        return values

    def after_values(category: str, subcat: str, criterion: str) -> list[int]:
        values = []
        for sample, original in zip(curated, originals):
            labels = _post_labels(sample, original, category)
            if subcat in labels:
                values.append(getattr(sample.post_judgment, criterion))
        return values

    subcategory_means: dict[tuple[str, str], dict[str, MeanShift]] = {}
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            shifts = {}
            for criterion in REPORT_CRITERIA:
                shifts[criterion] = MeanShift(
                    before=_mean(before_values(category, subcat, criterion)),
                    after=_mean(after_values(category, subcat, criterion)),
                )
            subcategory_means[(category, subcat)] = shifts

    overall = {
        criterion: MeanShift(
            before=_mean([j.score(criterion) for j in judgments.values()]),
            after=_mean([getattr(c.post_judgment, criterion) for c in curated]),
        )
        for criterion in REPORT_CRITERIA
    }

    total_before = len(judgments)
    total_after = len(curated)

    def shift(label: str, before_count: int, after_count: int) -> CategoryShift:
        return CategoryShift(
            count_before=before_count,
            pct_before=100.0 * before_count / total_before if total_before else 0.0,
            count_after=after_count,
            pct_after=100.0 * after_count / total_after if total_after else 0.0,
        )

    nature_shift = {
        label: shift(
            label,
            sum(1 for j in judgments.values() if label in j.natures),
            sum(1 for c in curated if label in c.post_judgment.natures),
        )
        for label in NATURE_LABELS
    }
    civility_shift = {
        label: shift(
            label,
            sum(1 for j in judgments.values() if j.civility == label),
            sum(1 for c in curated if c.post_judgment.civility == label),
        )
        for label in CIVILITY_LABELS
    }

    return CurationReport(
        total_in=len(judgments),
        kept=len(curated),
        removed_ids=removed,
        quarantined=quarantined,
        overall=overall,
        subcategories=subcategory_means,
        nature_shift=nature_shift,
        civility_shift=civility_shift,
    )


def _carries(judgment: Judgment, category: str, subcat: str) -> bool:
    if category == "Type":
        return subcat in judgment.types
    if category == "Nature":
        return subcat in judgment.natures
    return judgment.civility == subcat


def _post_labels(sample: CuratedSample, original: Judgment, category: str):
    if category == "Type":
        return original.types  # types are not re-judged
    if category == "Nature":
        return sample.post_judgment.natures
    return {sample.post_judgment.civility}


def report_to_json(report: CurationReport) -> dict:
    def shift_dict(shift: MeanShift) -> dict:
        return {"before": shift.before, "after": shift.after, "delta": shift.delta}

    return {
        "total_in": report.total_in,
        "kept": report.kept,
        "removed": {"count": len(report.removed_ids), "ids": list(report.removed_ids)},
        "quarantined": report.quarantined,
        "overall": {crit: shift_dict(s) for crit, s in report.overall.items()},
        "subcategories": {
            f"{category}/{subcat}": {crit: shift_dict(s) for crit, s in shifts.items()}
            for (category, subcat), shifts in report.subcategories.items()
        },
        "nature_shift": {
            label: vars(s).copy() for label, s in report.nature_shift.items()
        },
        "civility_shift": {
            label: vars(s).copy() for label, s in report.civility_shift.items()
        },
    }


def _fmt_shift(shift: MeanShift) -> str:
    if shift.after is None:
        return "--"
    if shift.delta is None:
        return f"{shift.after:.2f}"
    arrow = "↑" if shift.delta >= 0 else "↓"
    return f"{shift.after:.2f} ({arrow} {abs(shift.delta):.2f})"


def render_report(report: CurationReport) -> str:
    """Plain-text evolution table: after-value with a signed-arrow delta."""
    rows: list[tuple[str, str, str, str]] = []
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            shifts = report.subcategories[(category, subcat)]
            rows.append(
                (category, subcat, _fmt_shift(shifts["clarity"]), _fmt_shift(shifts["conciseness"]))
            )
    rows.append(
        ("Average", "-", _fmt_shift(report.overall["clarity"]), _fmt_shift(report.overall["conciseness"]))
    )

    header = ("Category", "Subcategory", "Clarity", "Conciseness")
    widths = [max(len(row[i]) for row in rows + [header]) for i in range(4)]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(4)),
        "  ".join("-" * widths[i] for i in range(4)),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(4)))
    lines.append("")
    lines.append(
        f"total_in={report.total_in} kept={report.kept} "
        f"removed={len(report.removed_ids)} quarantined={report.quarantined}"
    )
    return "\n".join(lines) + "\n"
