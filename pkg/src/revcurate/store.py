"""Durable annotation store backing the sanity-check workflow.

Accepted writes are appended to JSON Lines logs and fsync'd before the call
returns, so a crash between writes never loses an accepted record; restart
replays the logs. A single lock serializes mutations (two annotators, local
service: contention is not a concern, durability is).
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import jsonl
from .agreement import (
    DIMENSIONS,
    AnnotationLabels,
    AnnotationRecord,
    Conflict,
    ConsensusRecord,
    compare_dimensions,
    labels_from_record,
    labels_to_record,
)
from .corpus import Corpus
from .framework import (
    CIVILITY_LABELS,
    NATURE_LABELS,
    TYPE_LABELS,
    sort_labels,
    valid_score,
)


class StoreError(ValueError):
    pass


class UnknownSample(StoreError):
    pass


class UnknownAnnotator(StoreError):
    pass


class DuplicateAnnotation(StoreError):
    pass


class NotInConflict(StoreError):
    pass


class InvalidField(StoreError):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class Resolution:
    sample_id: str
    dimension: str
    value: object
    note: str = ""


def _require_label_list(field: str, value, space: tuple[str, ...]) -> frozenset[str]:
    if not isinstance(value, list) or not value:
        raise InvalidField(field, f"{field} must be a non-empty list of labels")
    labels = set()
    for token in value:
        if not isinstance(token, str) or token not in space:
            raise InvalidField(field, f"invalid {field} label: {token!r}")
        labels.add(token)
    return frozenset(labels)


def _require_score(field: str, value) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not valid_score(value):
        raise InvalidField(field, f"{field} must be an integer in [1, 10], got {value!r}")
    return value


def labels_from_payload(payload: dict) -> AnnotationLabels:
    """Validate a request payload against the framework's label spaces."""
    if not isinstance(payload, dict):
        raise InvalidField("labels", "labels must be an object")
    civility = payload.get("civility")
    if not isinstance(civility, str) or civility not in CIVILITY_LABELS:
        raise InvalidField("civility", f"civility must be one of {list(CIVILITY_LABELS)}")
    return AnnotationLabels(
        types=_require_label_list("types", payload.get("types"), TYPE_LABELS),
        natures=_require_label_list("natures", payload.get("natures"), NATURE_LABELS),
        civility=civility,
        relevance=_require_score("relevance", payload.get("relevance")),
        clarity=_require_score("clarity", payload.get("clarity")),
        conciseness=_require_score("conciseness", payload.get("conciseness")),
    )


def _validate_resolution_value(dimension: str, value) -> object:
    if dimension == "types":
        return _require_label_list("types", value, TYPE_LABELS)
    if dimension == "natures":
        return _require_label_list("natures", value, NATURE_LABELS)
    if dimension == "civility":
        if not isinstance(value, str) or value not in CIVILITY_LABELS:
            raise InvalidField("civility", f"civility must be one of {list(CIVILITY_LABELS)}")
        return value
    return _require_score(dimension, value)


def dimension_to_json(dimension: str, value) -> object:
    if dimension == "types":
        return sort_labels(value, TYPE_LABELS)
    if dimension == "natures":
        return sort_labels(value, NATURE_LABELS)
    return value


class AnnotationStore:
    ANNOTATIONS_LOG = "annotations.jsonl"
    RESOLUTIONS_LOG = "resolutions.jsonl"

    def __init__(self, root: str | Path, corpus: Corpus, annotators: tuple[str, str]):
        if len(set(annotators)) != 2:
            raise StoreError("exactly two distinct annotator ids are required")
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.corpus = corpus
        self.annotators = tuple(annotators)
        self._lock = threading.Lock()
        self._annotations: dict[tuple[str, str], AnnotationRecord] = {}
        self._resolutions: dict[tuple[str, str], Resolution] = {}
        self._replay()

    # -- log handling ---------------------------------------------------

    def _replay(self) -> None:
        annotations_path = self.root / self.ANNOTATIONS_LOG
        if annotations_path.exists():
            for record in jsonl.iter_jsonl(annotations_path):
                annotation = AnnotationRecord(
                    sample_id=record["sample_id"],
                    annotator_id=record["annotator_id"],
                    labels=labels_from_record(record["labels"]),
                    note=record.get("note", ""),
                )
                self._annotations[(annotation.sample_id, annotation.annotator_id)] = annotation
        resolutions_path = self.root / self.RESOLUTIONS_LOG
        if resolutions_path.exists():
            for record in jsonl.iter_jsonl(resolutions_path):
                dimension = record["dimension"]
                value = record["value"]
                if dimension in ("types", "natures"):
                    value = frozenset(value)
                resolution = Resolution(
                    sample_id=record["sample_id"],
                    dimension=dimension,
                    value=value,
                    note=record.get("note", ""),
                )
                self._resolutions[(resolution.sample_id, resolution.dimension)] = resolution

    def _append(self, filename: str, record: dict) -> None:
        path = self.root / filename
        with open(path, "a", encoding="utf-8", newline="\n") as handle:
            handle.write(jsonl.dumps_record(record))
            handle.write("\n")
            handle.flush()
            os.fsync(handle.fileno())

    # -- annotation flow --------------------------------------------------

    def _check_annotator(self, annotator_id: str) -> None:
        if annotator_id not in self.annotators:
            raise UnknownAnnotator(f"unknown annotator {annotator_id!r}")

    def next_sample(self, annotator_id: str):
        """First sample (by id) this annotator has not labeled yet."""
        self._check_annotator(annotator_id)
        with self._lock:
            for sample in self.corpus:
                if (sample.id, annotator_id) not in self._annotations:
                    return sample
        return None

    def remaining(self, annotator_id: str) -> int:
        self._check_annotator(annotator_id)
        with self._lock:
            done = sum(1 for (sid, aid) in self._annotations if aid == annotator_id)
        return len(self.corpus) - done

    def add_annotation(self, record: AnnotationRecord) -> None:
        self._check_annotator(record.annotator_id)
        if record.sample_id not in self.corpus:
            raise UnknownSample(f"unknown sample {record.sample_id!r}")
        with self._lock:
            key = (record.sample_id, record.annotator_id)
            if key in self._annotations:
                raise DuplicateAnnotation(
                    f"sample {record.sample_id} already annotated by {record.annotator_id}"
                )
            self._append(
                self.ANNOTATIONS_LOG,
                {
                    "sample_id": record.sample_id,
                    "annotator_id": record.annotator_id,
                    "labels": labels_to_record(record.labels),
                    "note": record.note,
                },
            )
            self._annotations[key] = record

    def annotations(self) -> list[AnnotationRecord]:
        with self._lock:
            return [self._annotations[key] for key in sorted(self._annotations)]

    # -- conflicts and consensus ------------------------------------------

    def _pairs(self) -> Iterable[tuple[str, AnnotationRecord, AnnotationRecord]]:
        first, second = self.annotators
        for sample in self.corpus:
            a = self._annotations.get((sample.id, first))
            b = self._annotations.get((sample.id, second))
            if a is not None and b is not None:
                yield sample.id, a, b

    def conflicts(self) -> list[Conflict]:
        """Open (unresolved) disagreements over doubly-annotated samples."""
        with self._lock:
            found = []
            for sample_id, a, b in self._pairs():
                for dimension in compare_dimensions(a.labels, b.labels):
                    if (sample_id, dimension) not in self._resolutions:
                        found.append(
                            Conflict(
                                sample_id=sample_id,
                                dimension=dimension,
                                value_a=a.labels.dimension(dimension),
                                value_b=b.labels.dimension(dimension),
                            )
                        )
            return found

    def add_resolution(self, sample_id: str, dimension: str, value, note: str = "") -> None:
        if dimension not in DIMENSIONS:
            raise InvalidField("dimension", f"unknown dimension {dimension!r}")
        validated = _validate_resolution_value(dimension, value)
        with self._lock:
            open_conflicts = {
                (c.sample_id, c.dimension)
                for sid, a, b in self._pairs()
                for c in (
                    Conflict(sid, d, a.labels.dimension(d), b.labels.dimension(d))
                    for d in compare_dimensions(a.labels, b.labels)
                )
                if (c.sample_id, c.dimension) not in self._resolutions
            }
            if (sample_id, dimension) not in open_conflicts:
                raise NotInConflict(f"no open conflict for {sample_id}/{dimension}")
            self._append(
                self.RESOLUTIONS_LOG,
                {
                    "sample_id": sample_id,
                    "dimension": dimension,
                    "value": dimension_to_json(dimension, validated),
                    "note": note,
                },
            )
            self._resolutions[(sample_id, dimension)] = Resolution(
                sample_id=sample_id, dimension=dimension, value=validated, note=note
            )

    def consensus(self) -> list[ConsensusRecord]:
        """One record per doubly-annotated sample with no open conflicts."""
        with self._lock:
            records = []
            for sample_id, a, b in self._pairs():
                disagreements = compare_dimensions(a.labels, b.labels)
                resolved = {}
                notes = []
                complete = True
                for dimension in disagreements:
                    resolution = self._resolutions.get((sample_id, dimension))
                    if resolution is None:
                        complete = False
                        break
                    resolved[dimension] = resolution.value
                    if resolution.note:
                        notes.append(f"{dimension}: {resolution.note}")
                if not complete:
                    continue
                merged = {
                    name: resolved.get(name, a.labels.dimension(name)) for name in DIMENSIONS
                }
                records.append(
                    ConsensusRecord(
                        sample_id=sample_id,
                        labels=AnnotationLabels(**merged),
                        resolution_note="; ".join(notes),
                    )
                )
            return records

    # -- export ------------------------------------------------------------

    def export_records(self) -> list[dict]:
        """Annotation records then consensus records, in stable order."""
        lines = [
            {
                "kind": "annotation",
                "sample_id": record.sample_id,
                "annotator_id": record.annotator_id,
                "labels": labels_to_record(record.labels),
                "note": record.note,
            }
            for record in self.annotations()
        ]
        lines.extend(
            {
                "kind": "consensus",
                "sample_id": record.sample_id,
                "labels": labels_to_record(record.labels),
                "resolution_note": record.resolution_note,
            }
            for record in self.consensus()
        )
        return lines


def read_consensus(path: str | Path) -> list[ConsensusRecord]:
    """Consensus records from an exported annotation file."""
    records = []
    for record in jsonl.iter_jsonl(path):
        if record.get("kind") != "consensus":
            continue
        records.append(
            ConsensusRecord(
                sample_id=record["sample_id"],
                labels=labels_from_record(record["labels"]),
                resolution_note=record.get("resolution_note", ""),
            )
        )
    return records
