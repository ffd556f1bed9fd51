"""Inter-rater agreement between human annotators and the LLM judge.

Cohen's kappa is computed as

    kappa = (p_o - p_e) / (1 - p_e)

where p_o is the observed agreement and p_e the agreement expected from the
raters' marginal label distributions. The weighted generalization scores
partial credit by label distance; with 0/1 weights it reduces to the plain
statistic. All sums are integer-exact, the single division happens last.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .framework import (
    CIVILITY_LABELS,
    NATURE_LABELS,
    SCORE_MAX,
    SCORE_MIN,
    TYPE_LABELS,
    sort_labels,
    valid_score,
)
from .parsing import EmptyLabelSet, InvalidLabel, Judgment, OutOfRange

DIMENSIONS = ("types", "natures", "civility", "relevance", "clarity", "conciseness")

WEIGHTINGS = ("none", "linear")


class AgreementError(ValueError):
    pass


class CoverageMismatch(AgreementError):
    def __init__(self, missing_from_a: list[str], missing_from_b: list[str]):
        super().__init__(
            f"annotator coverage differs; missing from A: {missing_from_a}, "
            f"missing from B: {missing_from_b}"
        )
        self.missing_from_a = missing_from_a
        self.missing_from_b = missing_from_b


def cohen_kappa(
    a: Sequence[Hashable],
    b: Sequence[Hashable],
    label_space: Sequence[Hashable],
    weighting: str = "none",
) -> float:
    """Chance-corrected agreement between two equal-length label sequences.

    ``label_space`` fixes the label indexing; ``linear`` weighting penalizes
    disagreements by index distance (appropriate for ordinal scores). When
    expected disagreement is zero (both raters constant on one shared label)
    the sequences agree everywhere and 1.0 is returned by convention.
    """
    if weighting not in WEIGHTINGS:
        raise AgreementError(f"unknown weighting {weighting!r}")
    if len(a) != len(b):
        raise AgreementError(f"sequence lengths differ: {len(a)} vs {len(b)}")
    if not a:
        raise AgreementError("empty sequences")

    index = {label: i for i, label in enumerate(label_space)}
    if len(index) != len(label_space):
        raise AgreementError("label space contains duplicates")
    try:
        seq_a = [index[x] for x in a]
        seq_b = [index[x] for x in b]
    except KeyError as exc:
        raise AgreementError(f"label outside label space: {exc.args[0]!r}") from None

    k = len(label_space)
    n = len(seq_a)
    observed = [[0] * k for _ in range(k)]
    for i, j in zip(seq_a, seq_b):
        observed[i][j] += 1
    marg_a = [sum(observed[i][j] for j in range(k)) for i in range(k)]
    marg_b = [sum(observed[i][j] for i in range(k)) for j in range(k)]

    def weight(i: int, j: int) -> int:
        if weighting == "linear":
            return abs(i - j)
        return 0 if i == j else 1

    observed_disagreement = sum(
        weight(i, j) * observed[i][j] for i in range(k) for j in range(k)
    )
    expected_disagreement = sum(
        weight(i, j) * marg_a[i] * marg_b[j] for i in range(k) for j in range(k)
    )

    if expected_disagreement == 0:
        # Only possible when both raters always chose the same single label.
        return 1.0
    return 1.0 - (n * observed_disagreement) / expected_disagreement


@dataclass(frozen=True)
class AnnotationLabels:
    """Framework labels without the judge-only fields (reference, rationale)."""

    types: frozenset[str]
    natures: frozenset[str]
    civility: str
    relevance: int
    clarity: int
    conciseness: int

    def __post_init__(self):
        if not self.types:
            raise EmptyLabelSet("types")
        for label in self.types:
            if label not in TYPE_LABELS:
                raise InvalidLabel("types", label)
        if not self.natures:
            raise EmptyLabelSet("natures")
        for label in self.natures:
            if label not in NATURE_LABELS:
                raise InvalidLabel("natures", label)
        if self.civility not in CIVILITY_LABELS:
            raise InvalidLabel("civility", self.civility)
        for name in ("relevance", "clarity", "conciseness"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or not valid_score(value):
                raise OutOfRange(name, value)

    def dimension(self, name: str):
        return getattr(self, name)


@dataclass(frozen=True)
class AnnotationRecord:
    sample_id: str
    annotator_id: str
    labels: AnnotationLabels
    note: str = ""


@dataclass(frozen=True)
class ConsensusRecord:
    sample_id: str
    labels: AnnotationLabels
    resolution_note: str = ""


def labels_from_judgment(judgment: Judgment) -> AnnotationLabels:
    return AnnotationLabels(
        types=judgment.types,
        natures=judgment.natures,
        civility=judgment.civility,
        relevance=judgment.relevance,
        clarity=judgment.clarity,
        conciseness=judgment.conciseness,
    )


def labels_to_record(labels: AnnotationLabels) -> dict:
    return {
        "types": sort_labels(labels.types, TYPE_LABELS),
        "natures": sort_labels(labels.natures, NATURE_LABELS),
        "civility": labels.civility,
        "relevance": labels.relevance,
        "clarity": labels.clarity,
        "conciseness": labels.conciseness,
    }


def labels_from_record(record: Mapping) -> AnnotationLabels:
    return AnnotationLabels(
        types=frozenset(record["types"]),
        natures=frozenset(record["natures"]),
        civility=record["civility"],
        relevance=record["relevance"],
        clarity=record["clarity"],
        conciseness=record["conciseness"],
    )


@dataclass(frozen=True)
class Conflict:
    sample_id: str
    dimension: str
    value_a: object
    value_b: object


def compare_dimensions(a: AnnotationLabels, b: AnnotationLabels) -> list[str]:
    return [name for name in DIMENSIONS if a.dimension(name) != b.dimension(name)]


def find_conflicts(
    records_a: Iterable[AnnotationRecord],
    records_b: Iterable[AnnotationRecord],
) -> list[Conflict]:
    """Per-dimension disagreements between two annotators, ordered by sample id.

    Both annotators must cover the same sample ids; otherwise the error lists
    the ids each side is missing.
    """
    by_a = {r.sample_id: r for r in records_a}
    by_b = {r.sample_id: r for r in records_b}
    if set(by_a) != set(by_b):
        raise CoverageMismatch(
            missing_from_a=sorted(set(by_b) - set(by_a)),
            missing_from_b=sorted(set(by_a) - set(by_b)),
        )

    conflicts: list[Conflict] = []
    for sample_id in sorted(by_a):
        labels_a, labels_b = by_a[sample_id].labels, by_b[sample_id].labels
        for dimension in compare_dimensions(labels_a, labels_b):
            conflicts.append(
                Conflict(
                    sample_id=sample_id,
                    dimension=dimension,
                    value_a=labels_a.dimension(dimension),
                    value_b=labels_b.dimension(dimension),
                )
            )
    return conflicts


SCORE_SPACE = tuple(range(SCORE_MIN, SCORE_MAX + 1))


def _presence_kappa(
    human: list[AnnotationLabels], llm: list[AnnotationLabels], dimension: str, space: tuple[str, ...]
) -> dict:
    """Per-label binary presence/absence kappa, macro-averaged."""
    per_label = {}
    for label in space:
        a = [label in h.dimension(dimension) for h in human]
        b = [label in l.dimension(dimension) for l in llm]
        per_label[label] = cohen_kappa(a, b, (False, True))
    macro = sum(per_label.values()) / len(per_label)
    return {"macro": macro, "per_label": per_label}


def kappa_report(
    consensus: Iterable[ConsensusRecord],
    judgments: Mapping[str, Judgment],
) -> dict:
    """Per-dimension agreement between human consensus and the LLM judge.

    Only samples present on both sides enter the computation. Civility is a
    plain binary kappa; the multi-label categories are reduced to
    per-subcategory presence kappas (macro-averaged); the 1-10 criteria get
    an unweighted kappa as the headline number, with the linear-weighted
    variant reported alongside.
    """
    by_id = {record.sample_id: record for record in consensus}
    overlap = sorted(set(by_id) & set(judgments))
    if not overlap:
        raise AgreementError("no overlapping sample ids between consensus and judgments")

    human = [by_id[sid].labels for sid in overlap]
    llm = [labels_from_judgment(judgments[sid]) for sid in overlap]

    report: dict = {"samples": len(overlap)}
    report["civility"] = cohen_kappa(
        [h.civility for h in human], [l.civility for l in llm], CIVILITY_LABELS
    )
    report["type"] = _presence_kappa(human, llm, "types", TYPE_LABELS)
    report["nature"] = _presence_kappa(human, llm, "natures", NATURE_LABELS)
    for criterion in ("relevance", "clarity", "conciseness"):
        a = [h.dimension(criterion) for h in human]
        b = [l.dimension(criterion) for l in llm]
        report[criterion] = {
            "unweighted": cohen_kappa(a, b, SCORE_SPACE),
            "linear": cohen_kappa(a, b, SCORE_SPACE, weighting="linear"),
        }
    return report


def render_kappa_report(report: dict) -> str:
    lines = [f"samples: {report['samples']}", ""]
    lines.append(f"{'dimension':<14}{'kappa':>10}")
    lines.append(f"{'-' * 14}{'-' * 10}")
    lines.append(f"{'civility':<14}{report['civility']:>10.4f}")
    lines.append(f"{'type':<14}{report['type']['macro']:>10.4f}")
    lines.append(f"{'nature':<14}{report['nature']['macro']:>10.4f}")
    for criterion in ("relevance", "clarity", "conciseness"):
        entry = report[criterion]
        lines.append(
            f"{criterion:<14}{entry['unweighted']:>10.4f}  (linear {entry['linear']:.4f})"
        )
    return "\n".join(lines) + "\n"
