"""Review-corpus ingestion, validation, deterministic splits, and pairing.

A corpus is an id-unique, id-ordered collection of review samples. All
operations here are pure and deterministic given (input bytes, seed), which
is what makes the whole pipeline rerunnable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from . import jsonl
from .diffs import DiffError, parse_unified_diff
from .framework import LANGUAGES, normalize_language

# Upstream dumps use varying field names; these defaults match the most
# common layout and can be overridden per import.
DEFAULT_FIELD_MAPPING = {
    "comment": "comment",
    "diff": "patch",
    "old_file": "old",
    "language": "lang",
}

ID_WIDTH = 6


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class ReviewSample:
    """One code change under review."""

    id: str
    language: str
    old_file: str
    diff: str
    comment: str
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise CorpusError(f"sample {self.id}: unknown language {self.language!r}")
        if not self.comment.strip():
            raise CorpusError(f"sample {self.id}: empty comment")


@dataclass(frozen=True)
class Provenance:
    source: str
    imported_at: str  # ISO-8601; in-memory bookkeeping only, never serialized


class Corpus:
    """Ordered collection of samples; iteration is ascending by id."""

    def __init__(self, samples: Iterable[ReviewSample], provenance: Provenance | None = None):
        ordered = sorted(samples, key=lambda s: s.id)
        seen: set[str] = set()
        for sample in ordered:
            if sample.id in seen:
                raise CorpusError(f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)
        self._samples: tuple[ReviewSample, ...] = tuple(ordered)
        self._by_id = {sample.id: sample for sample in ordered}
        self.provenance = provenance

    def __len__(self) -> int:
        return len(self._samples)

    def __iter__(self) -> Iterator[ReviewSample]:
        return iter(self._samples)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._by_id

    def __getitem__(self, sample_id: str) -> ReviewSample:
        return self._by_id[sample_id]

    def get(self, sample_id: str) -> ReviewSample | None:
        return self._by_id.get(sample_id)

    def ids(self) -> list[str]:
        return [sample.id for sample in self._samples]

    def subset(self, ids: Iterable[str]) -> "Corpus":
        wanted = set(ids)
        missing = wanted - set(self._by_id)
        if missing:
            raise CorpusError(f"unknown sample ids: {sorted(missing)}")
        return Corpus([s for s in self._samples if s.id in wanted], self.provenance)


@dataclass(frozen=True)
class Reject:
    id: str
    reason: str


@dataclass
class ImportResult:
    corpus: Corpus
    rejects: list[Reject]


def import_samples(
    records: Iterable[Mapping[str, Any]],
    mapping: Mapping[str, str] | None = None,
    source: str = "<stream>",
) -> ImportResult:
    """Build a corpus from raw records, routing malformed ones to rejects.

    A record must provide a non-empty comment, a parseable unified diff, and
    a known language under the mapped field names. Records without an ``id``
    get a zero-padded ordinal (their position in the stream), so rejects are
    addressable too. An empty stream yields an empty corpus.
    """
    fields = dict(DEFAULT_FIELD_MAPPING)
    if mapping:
        fields.update(mapping)

    samples: list[ReviewSample] = []
    rejects: list[Reject] = []
    seen_ids: set[str] = set()

    for ordinal, record in enumerate(records):
        record_id = record.get("id")
        if record_id is None:
            record_id = f"{ordinal:0{ID_WIDTH}d}"
        record_id = str(record_id)

        def reject(reason: str) -> None:
            rejects.append(Reject(record_id, reason))

        if record_id in seen_ids:
            reject("duplicate id")
            continue

        comment = record.get(fields["comment"])
        if not isinstance(comment, str) or not comment.strip():
            reject("empty comment" if isinstance(comment, str) else "missing comment")
            continue

        raw_language = record.get(fields["language"])
        if not isinstance(raw_language, str):
            reject("missing language")
            continue
        language = normalize_language(raw_language)
        if language is None:
            reject("unknown language")
            continue

        diff = record.get(fields["diff"])
        if not isinstance(diff, str) or not diff:
            reject("missing diff")
            continue
        try:
            parse_unified_diff(diff)
        except DiffError as exc:
            reject(f"invalid diff: {exc}")
            continue

        old_file = record.get(fields["old_file"])
        if old_file is None:
            old_file = ""
        if not isinstance(old_file, str):
            reject("invalid old file")
            continue

        meta_raw = record.get("meta", {})
        if meta_raw is None:
            meta_raw = {}
        if not isinstance(meta_raw, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in meta_raw.items()
        ):
            reject("invalid meta")
            continue

        seen_ids.add(record_id)
        samples.append(
            ReviewSample(
                id=record_id,
                language=language,
                old_file=old_file,
                diff=diff,
                comment=comment,
                meta=dict(meta_raw),
            )
        )

    provenance = Provenance(source=source, imported_at=datetime.now(timezone.utc).isoformat())
    return ImportResult(corpus=Corpus(samples, provenance), rejects=rejects)


def sample_to_record(sample: ReviewSample) -> dict[str, Any]:
    return {
        "id": sample.id,
        "lang": sample.language,
        "old": sample.old_file,
        "patch": sample.diff,
        "comment": sample.comment,
        "meta": dict(sample.meta),
    }


def write_corpus(corpus: Corpus, path: str | Path) -> int:
    return jsonl.dump_jsonl((sample_to_record(s) for s in corpus), path)


def read_corpus(path: str | Path) -> Corpus:
    result = import_samples(
        jsonl.iter_jsonl(path),
        mapping={"comment": "comment", "diff": "patch", "old_file": "old", "language": "lang"},
        source=str(path),
    )
    if result.rejects:
        first = result.rejects[0]
        raise CorpusError(
            f"{path}: {len(result.rejects)} invalid records "
            f"(first: {first.id}: {first.reason}); run import to triage"
        )
    return result.corpus


def write_rejects(rejects: list[Reject], path: str | Path) -> int:
    return jsonl.dump_jsonl(({"id": r.id, "reason": r.reason} for r in rejects), path)


def split(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Seeded uniform shuffle, then prefix cut at floor(n * train_fraction)."""
    if not 0 < train_fraction < 1:
        raise CorpusError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(corpus) < 2:
        raise CorpusError("cannot split a corpus of fewer than 2 samples")

    ids = corpus.ids()
    random.Random(seed).shuffle(ids)
    train_n = int(len(ids) * train_fraction)
    train_ids = ids[:train_n]
    eval_ids = ids[train_n:]
    return corpus.subset(train_ids), corpus.subset(eval_ids)


@dataclass(frozen=True)
class CommentPair:
    """Original comment and its reformulated counterpart, keyed by sample id."""

    id: str
    original: str
    curated: str


def pair_subsets(
    original: Corpus,
    curated_comments: Mapping[str, str],
    n: int,
    seed: int,
    stratify_by_language: bool = False,
) -> list[CommentPair]:
    """Sample ``n`` kept ids without replacement and pair both comment versions.

    Sampling is uniform by default; ``stratify_by_language`` allocates the
    draw proportionally to the language distribution of the kept ids.
    """
    kept_ids = sorted(curated_comments)
    unpaired = [sid for sid in kept_ids if sid not in original]
    if unpaired:
        raise CorpusError(f"unpaired id: {unpaired[0]}")
    if n > len(kept_ids):
        raise CorpusError(f"requested {n} pairs but only {len(kept_ids)} kept ids exist")

    rng = random.Random(seed)
    if stratify_by_language:
        chosen = _stratified_sample(original, kept_ids, n, rng)
    else:
        chosen = rng.sample(kept_ids, n)

    return [
        CommentPair(id=sid, original=original[sid].comment, curated=curated_comments[sid])
        for sid in sorted(chosen)
    ]


def _stratified_sample(corpus: Corpus, ids: list[str], n: int, rng: random.Random) -> list[str]:
    groups: dict[str, list[str]] = {}
    for sid in ids:
        groups.setdefault(corpus[sid].language, []).append(sid)

    total = len(ids)
    quotas = {lang: (n * len(members)) // total for lang, members in groups.items()}
    assigned = sum(quotas.values())
    # Hand out the remainder to the largest groups, ties broken by name.
    leftover_order = sorted(groups, key=lambda lang: (-len(groups[lang]), lang))
    while assigned < n:
        progressed = False
        for lang in leftover_order:
            if assigned >= n:
                break
            if quotas[lang] < len(groups[lang]):
                quotas[lang] += 1
                assigned += 1
                progressed = True
        if not progressed:
            break

    chosen: list[str] = []
    for lang in sorted(groups):
        take = min(quotas[lang], len(groups[lang]))
        chosen.extend(rng.sample(groups[lang], take))
    return chosen
