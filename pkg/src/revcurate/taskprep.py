"""Export of downstream-task datasets in original and curated variants.

Both variants of a task share the same id membership and the same
train/eval split; only the comment text differs. Paired exports are the
input for the comparative fine-tuning study; the training constants used at
full scale are recorded in the manifest as metadata only.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from pathlib import Path

from . import jsonl
from .corpus import CommentPair, Corpus

COMMENT_GENERATION = "comment_generation"
CODE_REFINEMENT = "code_refinement"
TASKS = (COMMENT_GENERATION, CODE_REFINEMENT)

ORIGINAL = "original"
CURATED = "curated"
VARIANTS = (ORIGINAL, CURATED)

# Sample meta key holding the post-commit diff used as refinement target.
TARGET_DIFF_KEY = "target_diff"

# Recorded for provenance with every export; not consumed by this package.
FINETUNE_METADATA = {
    "method": "lora",
    "lora_r": 16,
    "lora_alpha": 32,
    "lora_dropout": 0.05,
    "batch_size": 4,
    "epochs": 5,
}

PROMPT_TEMPLATES = {
    COMMENT_GENERATION: (
        "Write a code review comment for the following change.\n\n"
        "### Code changes\n{diff}\n\n### Review comment\n"
    ),
    CODE_REFINEMENT: (
        "Revise the code change so it satisfies the review comment.\n\n"
        "### Old file\n{old_file}\n\n### Code changes\n{diff}\n\n"
        "### Review comment\n{comment}\n\n### Revised code changes\n"
    ),
}


class TaskExportError(ValueError):
    pass


@dataclass
class ExportManifest:
    task: str
    variant: str
    split_seed: int
    train_fraction: float
    train_count: int
    eval_count: int
    skipped_ids: list[str]

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "variant": self.variant,
            "split_seed": self.split_seed,
            "train_fraction": self.train_fraction,
            "counts": {
                "train": self.train_count,
                "eval": self.eval_count,
                "skipped": len(self.skipped_ids),
            },
            "skipped_ids": self.skipped_ids,
            "prompt_template_file": "prompt_template.txt",
            "finetune_metadata": FINETUNE_METADATA,
        }


def eligible_pairs(
    corpus: Corpus, pairs: list[CommentPair], task: str
) -> tuple[list[CommentPair], list[str]]:
    """Pairs usable for ``task`` plus the skipped ids.

    Refinement needs the old file and a recorded target diff; eligibility
    depends only on the sample, so both variants skip the same ids.
    """
    if task == COMMENT_GENERATION:
        return list(pairs), []
    usable, skipped = [], []
    for pair in pairs:
        sample = corpus[pair.id]
        if sample.old_file and sample.meta.get(TARGET_DIFF_KEY):
            usable.append(pair)
        else:
            skipped.append(pair.id)
    return usable, skipped


def split_pair_ids(pairs: list[CommentPair], split_seed: int, train_fraction: float) -> tuple[list[str], list[str]]:
    """Variant-independent split: seeded shuffle of the ids, prefix cut."""
    ids = sorted(pair.id for pair in pairs)
    random.Random(split_seed).shuffle(ids)
    cut = int(len(ids) * train_fraction)
    return sorted(ids[:cut]), sorted(ids[cut:])


def _task_record(corpus: Corpus, pair: CommentPair, task: str, variant: str) -> dict:
    sample = corpus[pair.id]
    comment = pair.original if variant == ORIGINAL else pair.curated
    if task == COMMENT_GENERATION:
        return {
            "id": pair.id,
            "task": task,
            "variant": variant,
            "input": {"diff": sample.diff},
            "target": comment,
        }
    return {
        "id": pair.id,
        "task": task,
        "variant": variant,
        "input": {"diff": sample.diff, "old_file": sample.old_file, "comment": comment},
        "target": sample.meta[TARGET_DIFF_KEY],
    }


def export_task(
    corpus: Corpus,
    pairs: list[CommentPair],
    task: str,
    variant: str,
    out_dir: str | Path,
    split_seed: int,
    train_fraction: float = 0.75,
) -> ExportManifest:
    """Write train/eval record files plus a manifest under ``out_dir``.

    Identical (pairs, seed, fraction) produce byte-identical files, so the
    manifest and data hashes double as a re-export check.
    """
    if task not in TASKS:
        raise TaskExportError(f"unknown task {task!r}")
    if variant not in VARIANTS:
        raise TaskExportError(f"unknown variant {variant!r}")
    for pair in pairs:
        if pair.id not in corpus:
            raise TaskExportError(f"unpaired id: {pair.id}")

    usable, skipped = eligible_pairs(corpus, pairs, task)
    train_ids, eval_ids = split_pair_ids(usable, split_seed, train_fraction)
    by_id = {pair.id: pair for pair in usable}

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_records = [_task_record(corpus, by_id[sid], task, variant) for sid in train_ids]
    eval_records = [_task_record(corpus, by_id[sid], task, variant) for sid in eval_ids]
    jsonl.dump_jsonl(train_records, out_dir / "train.jsonl")
    jsonl.dump_jsonl(eval_records, out_dir / "eval.jsonl")
    (out_dir / "prompt_template.txt").write_text(PROMPT_TEMPLATES[task], encoding="utf-8")

    manifest = ExportManifest(
        task=task,
        variant=variant,
        split_seed=split_seed,
        train_fraction=train_fraction,
        train_count=len(train_records),
        eval_count=len(eval_records),
        skipped_ids=skipped,
    )
    payload = manifest.to_json()
    payload["data_sha256"] = {
        "train.jsonl": _sha256(out_dir / "train.jsonl"),
        "eval.jsonl": _sha256(out_dir / "eval.jsonl"),
    }
    jsonl.dump_json(payload, out_dir / "manifest.json")
    return manifest


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()
