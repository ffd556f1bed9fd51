"""Parsing of raw judge completions into validated judgment records.

The judge is instructed to answer with a single fenced block of KEY: value
lines. The parser tolerates prose around the block, case differences in
labels, and unquoted text values, but it rejects anything that violates the
framework: every failure is a typed error naming the offending field, and
identical input always yields the identical error.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .framework import (
    CIVILITY_LABELS,
    NATURE_LABELS,
    TYPE_LABELS,
    normalize_civility,
    normalize_nature,
    normalize_type,
    sort_labels,
    valid_score,
)


class JudgmentParseError(ValueError):
    """Base class for judgment parse failures; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


class MissingField(JudgmentParseError):
    def __init__(self, field: str):
        super().__init__(field, f"missing required field {field!r}")


class OutOfRange(JudgmentParseError):
    def __init__(self, field: str, value: int):
        super().__init__(field, f"score {field!r} out of range [1, 10]: {value}")


class InvalidScore(JudgmentParseError):
    def __init__(self, field: str, raw: str):
        super().__init__(field, f"score {field!r} is not an integer: {raw!r}")


class InvalidLabel(JudgmentParseError):
    def __init__(self, field: str, token: str):
        super().__init__(field, f"unrecognized {field} label: {token!r}")


class EmptyLabelSet(JudgmentParseError):
    def __init__(self, field: str):
        super().__init__(field, f"label set {field!r} is empty")


class MissingReformulation(ValueError):
    pass


@dataclass(frozen=True)
class Judgment:
    """Validated judge output for one review comment."""

    reference_comment: str
    types: frozenset[str]
    natures: frozenset[str]
    civility: str
    relevance: int
    clarity: int
    conciseness: int
    rationale: str

    def __post_init__(self):
        _check_labels("type", self.types, TYPE_LABELS)
        _check_labels("nature", self.natures, NATURE_LABELS)
        if self.civility not in CIVILITY_LABELS:
            raise InvalidLabel("civility", self.civility)
        for name in ("relevance", "clarity", "conciseness"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidScore(name, repr(value))
            if not valid_score(value):
                raise OutOfRange(name, value)

    def score(self, criterion: str) -> int:
        return {"relevance": self.relevance, "clarity": self.clarity, "conciseness": self.conciseness}[criterion]


@dataclass(frozen=True)
class PostJudgment:
    """Re-evaluation of a reformulated comment; relevance is never re-scored."""

    natures: frozenset[str]
    civility: str
    clarity: int
    conciseness: int

    def __post_init__(self):
        _check_labels("nature", self.natures, NATURE_LABELS)
        if self.civility not in CIVILITY_LABELS:
            raise InvalidLabel("civility", self.civility)
        for name in ("clarity", "conciseness"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidScore(name, repr(value))
            if not valid_score(value):
                raise OutOfRange(name, value)


@dataclass(frozen=True)
class Reformulation:
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise MissingReformulation("reformulated comment is empty")


_KEY_LINE = re.compile(r"^\s*([A-Za-z_]+)\s*:\s?(.*)$")
_INT_VALUE = re.compile(r"^[+-]?\d+$")

EVALUATION_KEYS = (
    "REFERENCE_COMMENT",
    "TYPE",
    "NATURE",
    "CIVILITY",
    "RELEVANCE",
    "CLARITY",
    "CONCISENESS",
    "RATIONALE",
)


def _fenced_regions(raw: str) -> list[list[str]]:
    lines = raw.split("\n")
    fence_indexes = [i for i, line in enumerate(lines) if line.lstrip().startswith("```")]
    regions = []
    for start, end in zip(fence_indexes[0::2], fence_indexes[1::2]):
        regions.append(lines[start + 1 : end])
    return regions


def _key_values(raw: str, keys: tuple[str, ...]) -> dict[str, str]:
    """KEY: value pairs from the first fenced block carrying known keys.

    Falls back to scanning the whole text when the judge forgot the fences.
    First occurrence of each key wins.
    """
    wanted = {k.upper() for k in keys}
    candidates = _fenced_regions(raw)
    candidates.append(raw.split("\n"))

    for region in candidates:
        found: dict[str, str] = {}
        for line in region:
            match = _KEY_LINE.match(line)
            if not match:
                continue
            key = match.group(1).upper()
            if key in wanted and key not in found:
                found[key] = match.group(2)
        if found:
            return found
    return {}


def _text_value(raw_value: str) -> str:
    """Unquote a JSON-quoted value; keep anything else verbatim (trimmed)."""
    value = raw_value.strip()
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        try:
            decoded = json.loads(value)
        except json.JSONDecodeError:
            return value
        if isinstance(decoded, str):
            return decoded
    return value


def _label_set(field: str, raw_value: str, normalize) -> frozenset[str]:
    tokens = [tok for tok in (t.strip() for t in raw_value.split(",")) if tok]
    if not tokens:
        raise EmptyLabelSet(field)
    labels = set()
    for token in tokens:
        label = normalize(token)
        if label is None:
            raise InvalidLabel(field, token)
        labels.add(label)
    return frozenset(labels)


def _score(field: str, raw_value: str) -> int:
    value = raw_value.strip()
    if not _INT_VALUE.match(value):
        raise InvalidScore(field, value)
    number = int(value)
    if not valid_score(number):
        raise OutOfRange(field, number)
    return number


def _check_labels(field: str, labels: frozenset[str], space: tuple[str, ...]) -> None:
    if not labels:
        raise EmptyLabelSet(field)
    for label in labels:
        if label not in space:
            raise InvalidLabel(field, label)


def _require(values: dict[str, str], key: str, field: str) -> str:
    if key not in values:
        raise MissingField(field)
    return values[key]


def parse_judgment(raw: str) -> Judgment:
    """Parse a full evaluation completion into a :class:`Judgment`."""
    values = _key_values(raw, EVALUATION_KEYS)
    return Judgment(
        reference_comment=_text_value(_require(values, "REFERENCE_COMMENT", "reference_comment")),
        types=_label_set("type", _require(values, "TYPE", "type"), normalize_type),
        natures=_label_set("nature", _require(values, "NATURE", "nature"), normalize_nature),
        civility=_civility(_require(values, "CIVILITY", "civility")),
        relevance=_score("relevance", _require(values, "RELEVANCE", "relevance")),
        clarity=_score("clarity", _require(values, "CLARITY", "clarity")),
        conciseness=_score("conciseness", _require(values, "CONCISENESS", "conciseness")),
        rationale=_text_value(_require(values, "RATIONALE", "rationale")),
    )


def parse_post_judgment(raw: str) -> PostJudgment:
    """Parse a re-evaluation completion; any RELEVANCE line is discarded."""
    values = _key_values(raw, EVALUATION_KEYS)
    return PostJudgment(
        natures=_label_set("nature", _require(values, "NATURE", "nature"), normalize_nature),
        civility=_civility(_require(values, "CIVILITY", "civility")),
        clarity=_score("clarity", _require(values, "CLARITY", "clarity")),
        conciseness=_score("conciseness", _require(values, "CONCISENESS", "conciseness")),
    )


def _civility(raw_value: str) -> str:
    label = normalize_civility(raw_value.strip())
    if label is None:
        raise InvalidLabel("civility", raw_value.strip())
    return label


def parse_reformulation(raw: str) -> Reformulation:
    """Extract the reformulated comment from a completion.

    Prefers the first fenced block; falls back to the whole text. A single
    pair of surrounding double quotes is stripped.
    """
    regions = _fenced_regions(raw)
    text = "\n".join(regions[0]) if regions else raw
    text = text.strip()
    if len(text) >= 2 and text.startswith('"') and text.endswith('"'):
        text = text[1:-1].strip()
    if not text:
        raise MissingReformulation("no reformulated comment found in completion")
    return Reformulation(text=text)


def serialize_judgment(judgment: Judgment) -> str:
    """Canonical completion text for a judgment (inverse of parse_judgment)."""
    lines = [
        "```",
        f"REFERENCE_COMMENT: {json.dumps(judgment.reference_comment, ensure_ascii=False)}",
        f"TYPE: {', '.join(sort_labels(judgment.types, TYPE_LABELS))}",
        f"NATURE: {', '.join(sort_labels(judgment.natures, NATURE_LABELS))}",
        f"CIVILITY: {judgment.civility}",
        f"RELEVANCE: {judgment.relevance}",
        f"CLARITY: {judgment.clarity}",
        f"CONCISENESS: {judgment.conciseness}",
        f"RATIONALE: {json.dumps(judgment.rationale, ensure_ascii=False)}",
        "```",
    ]
    return "\n".join(lines)


def serialize_post_judgment(post: PostJudgment) -> str:
    lines = [
        "```",
        f"NATURE: {', '.join(sort_labels(post.natures, NATURE_LABELS))}",
        f"CIVILITY: {post.civility}",
        f"CLARITY: {post.clarity}",
        f"CONCISENESS: {post.conciseness}",
        "```",
    ]
    return "\n".join(lines)


def serialize_reformulation(reformulation: Reformulation) -> str:
    return "```\n" + reformulation.text + "\n```"


def judgment_to_record(judgment: Judgment) -> dict:
    return {
        "reference_comment": judgment.reference_comment,
        "types": sort_labels(judgment.types, TYPE_LABELS),
        "natures": sort_labels(judgment.natures, NATURE_LABELS),
        "civility": judgment.civility,
        "relevance": judgment.relevance,
        "clarity": judgment.clarity,
        "conciseness": judgment.conciseness,
        "rationale": judgment.rationale,
    }


def judgment_from_record(record: dict) -> Judgment:
    return Judgment(
        reference_comment=record["reference_comment"],
        types=frozenset(record["types"]),
        natures=frozenset(record["natures"]),
        civility=record["civility"],
        relevance=record["relevance"],
        clarity=record["clarity"],
        conciseness=record["conciseness"],
        rationale=record["rationale"],
    )


def post_judgment_to_record(post: PostJudgment) -> dict:
    return {
        "natures": sort_labels(post.natures, NATURE_LABELS),
        "civility": post.civility,
        "clarity": post.clarity,
        "conciseness": post.conciseness,
    }


def post_judgment_from_record(record: dict) -> PostJudgment:
    return PostJudgment(
        natures=frozenset(record["natures"]),
        civility=record["civility"],
        clarity=record["clarity"],
        conciseness=record["conciseness"],
    )
