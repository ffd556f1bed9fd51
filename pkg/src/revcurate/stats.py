"""Descriptive analytics over a judged corpus.

Categories are multi-label, so subcategory percentages use the corpus size
as denominator and may sum past 100, and a sample contributes to the mean of
every subcategory it carries. Civility is single-label and partitions the
corpus.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Mapping

from .framework import CATEGORIES, CRITERIA, SCORE_MAX, SCORE_MIN
from .parsing import Judgment


class StatsError(ValueError):
    pass


def _carries(judgment: Judgment, category: str, subcat: str) -> bool:
    if category == "Type":
        return subcat in judgment.types
    if category == "Nature":
        return subcat in judgment.natures
    return judgment.civility == subcat


@dataclass
class DistributionReport:
    total: int
    # (category, subcategory) -> count / percentage of corpus
    counts: dict[tuple[str, str], int]
    percentages: dict[tuple[str, str], float]
    # criterion -> 10 bins, bin b counts samples scoring exactly b
    histograms: dict[str, list[int]]
    # (category, subcategory) -> criterion -> mean or None when unpopulated
    means: dict[tuple[str, str], dict[str, float | None]]
    # criterion -> corpus-wide mean
    overall_means: dict[str, float]


def _ordered_judgments(judgments: Mapping[str, Judgment]) -> list[Judgment]:
    if not judgments:
        raise StatsError("empty judged corpus")
    return [judgments[sid] for sid in sorted(judgments)]


def category_distribution(judgments: Mapping[str, Judgment]) -> tuple[
    dict[tuple[str, str], int], dict[tuple[str, str], float]
]:
    ordered = _ordered_judgments(judgments)
    total = len(ordered)
    counts: dict[tuple[str, str], int] = {}
    percentages: dict[tuple[str, str], float] = {}
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            count = sum(1 for j in ordered if _carries(j, category, subcat))
            counts[(category, subcat)] = count
            percentages[(category, subcat)] = 100.0 * count / total
    return counts, percentages


def score_means_by_category(
    judgments: Mapping[str, Judgment],
) -> tuple[dict[tuple[str, str], dict[str, float | None]], dict[str, float]]:
    ordered = _ordered_judgments(judgments)
    means: dict[tuple[str, str], dict[str, float | None]] = {}
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            member_scores = {
                criterion: [j.score(criterion) for j in ordered if _carries(j, category, subcat)]
                for criterion in CRITERIA
            }
            means[(category, subcat)] = {
                criterion: (sum(values) / len(values) if values else None)
                for criterion, values in member_scores.items()
            }
    overall = {
        criterion: sum(j.score(criterion) for j in ordered) / len(ordered)
        for criterion in CRITERIA
    }
    return means, overall


def score_histogram(judgments: Mapping[str, Judgment], criterion: str) -> list[int]:
    if criterion not in CRITERIA:
        raise StatsError(f"unknown criterion {criterion!r}")
    ordered = _ordered_judgments(judgments)
    bins = [0] * (SCORE_MAX - SCORE_MIN + 1)
    for judgment in ordered:
        bins[judgment.score(criterion) - SCORE_MIN] += 1
    return bins


def build_report(judgments: Mapping[str, Judgment]) -> DistributionReport:
    counts, percentages = category_distribution(judgments)
    means, overall = score_means_by_category(judgments)
    histograms = {criterion: score_histogram(judgments, criterion) for criterion in CRITERIA}
    return DistributionReport(
        total=len(judgments),
        counts=counts,
        percentages=percentages,
        histograms=histograms,
        means=means,
        overall_means=overall,
    )


def report_to_json(report: DistributionReport) -> dict:
    return {
        "total": report.total,
        "categories": {
            f"{category}/{subcat}": {
                "count": report.counts[(category, subcat)],
                "percentage": report.percentages[(category, subcat)],
            }
            for category, subcats in CATEGORIES.items()
            for subcat in subcats
        },
        "histograms": report.histograms,
        "means": {
            f"{category}/{subcat}": report.means[(category, subcat)]
            for category, subcats in CATEGORIES.items()
            for subcat in subcats
        },
        "overall_means": report.overall_means,
    }


def _fmt_mean(value: float | None) -> str:
    return "--" if value is None else f"{value:.2f}"


def render_means_table(report: DistributionReport) -> str:
    """Fixed-order means table: one row per subcategory plus an Average row."""
    rows: list[tuple[str, str, str, str, str]] = []
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            entry = report.means[(category, subcat)]
            rows.append(
                (
                    category,
                    subcat,
                    _fmt_mean(entry["relevance"]),
                    _fmt_mean(entry["clarity"]),
                    _fmt_mean(entry["conciseness"]),
                )
            )
    rows.append(
        (
            "Average",
            "-",
            _fmt_mean(report.overall_means["relevance"]),
            _fmt_mean(report.overall_means["clarity"]),
            _fmt_mean(report.overall_means["conciseness"]),
        )
    )

    header = ("Category", "Subcategory", "Relevance", "Clarity", "Conciseness")
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(5)]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(5)),
        "  ".join("-" * widths[i] for i in range(5)),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(5)))
    return "\n".join(lines) + "\n"


def histogram_csv(report: DistributionReport, criterion: str) -> str:
    """One CSV series per criterion histogram: score,count."""
    buffer = io.StringIO()
    buffer.write("score,count\n")
    for score, count in enumerate(report.histograms[criterion], start=SCORE_MIN):
        buffer.write(f"{score},{count}\n")
    return buffer.getvalue()


def distribution_csv(report: DistributionReport) -> str:
    buffer = io.StringIO()
    buffer.write("category,subcategory,count,percentage\n")
    for category, subcats in CATEGORIES.items():
        for subcat in subcats:
            count = report.counts[(category, subcat)]
            pct = report.percentages[(category, subcat)]
            buffer.write(f"{category},{subcat},{count},{pct:.6f}\n")
    return buffer.getvalue()
