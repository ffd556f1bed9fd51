from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest

import fixture_gen
from revcurate.corpus import CommentPair, pair_subsets
from revcurate.taskprep import (
    CODE_REFINEMENT,
    COMMENT_GENERATION,
    TaskExportError,
    eligible_pairs,
    export_task,
    split_pair_ids,
)


@pytest.fixture(scope="module")
def pairs(corpus200):
    kept = [sid for sid in corpus200.ids() if sid not in fixture_gen.REMOVED_IDS]
    curated = {sid: fixture_gen.plan_reformulation(sid) for sid in kept}
    return pair_subsets(corpus200, curated, n=50, seed=21)


def _read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def _tree_hash(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_cross_variant_id_equality(tmp_path, corpus200, pairs):
    for task in (COMMENT_GENERATION, CODE_REFINEMENT):
        manifests = {}
        for variant in ("original", "curated"):
            manifests[variant] = export_task(
                corpus200, pairs, task, variant, tmp_path / task / variant, split_seed=3
            )
        for split_name in ("train", "eval"):
            ids = {
                variant: [r["id"] for r in _read_jsonl(tmp_path / task / variant / f"{split_name}.jsonl")]
                for variant in ("original", "curated")
            }
            assert ids["original"] == ids["curated"]
        assert manifests["original"].skipped_ids == manifests["curated"].skipped_ids


def test_records_differ_only_in_comment(tmp_path, corpus200, pairs):
    for variant in ("original", "curated"):
        export_task(corpus200, pairs, COMMENT_GENERATION, variant, tmp_path / "cg" / variant, split_seed=3)
        export_task(corpus200, pairs, CODE_REFINEMENT, variant, tmp_path / "cr" / variant, split_seed=3)

    for split_name in ("train", "eval"):
        original = _read_jsonl(tmp_path / "cg" / "original" / f"{split_name}.jsonl")
        curated = _read_jsonl(tmp_path / "cg" / "curated" / f"{split_name}.jsonl")
        for rec_o, rec_c in zip(original, curated):
            assert rec_o["input"] == rec_c["input"]
            assert rec_o["id"] == rec_c["id"]
            assert rec_o["target"] != rec_c["target"]  # the comment is the target

        original = _read_jsonl(tmp_path / "cr" / "original" / f"{split_name}.jsonl")
        curated = _read_jsonl(tmp_path / "cr" / "curated" / f"{split_name}.jsonl")
        for rec_o, rec_c in zip(original, curated):
            assert rec_o["target"] == rec_c["target"]  # target diff is shared
            assert rec_o["input"]["diff"] == rec_c["input"]["diff"]
            assert rec_o["input"]["old_file"] == rec_c["input"]["old_file"]
            assert rec_o["input"]["comment"] != rec_c["input"]["comment"]


def test_split_sizes_and_counts(tmp_path, corpus200, pairs):
    manifest = export_task(
        corpus200, pairs, COMMENT_GENERATION, "original", tmp_path / "out", split_seed=3
    )
    assert manifest.train_count == 37  # floor(50 * 0.75)
    assert manifest.eval_count == 13
    assert manifest.skipped_ids == []


def test_refinement_skips_missing_old_file(tmp_path, corpus200):
    with_old = [sid for sid in corpus200.ids() if sid not in fixture_gen.REMOVED_IDS][:8]
    no_old = [f"{i:06d}" for i in fixture_gen.NO_OLD_FILE_INDEXES[:2]]
    chosen = sorted(with_old + no_old)
    pairs10 = [
        CommentPair(id=sid, original=corpus200[sid].comment, curated=f"curated {sid}")
        for sid in chosen
    ]
    usable, skipped = eligible_pairs(corpus200, pairs10, CODE_REFINEMENT)
    assert sorted(skipped) == sorted(no_old)
    manifests = {}
    for variant in ("original", "curated"):
        manifests[variant] = export_task(
            corpus200, pairs10, CODE_REFINEMENT, variant, tmp_path / variant, split_seed=5
        )
        assert manifests[variant].train_count + manifests[variant].eval_count == 8
    assert manifests["original"].skipped_ids == manifests["curated"].skipped_ids == sorted(no_old)


def test_reexport_is_byte_identical(tmp_path, corpus200, pairs):
    export_task(corpus200, pairs, COMMENT_GENERATION, "original", tmp_path / "first", split_seed=9)
    export_task(corpus200, pairs, COMMENT_GENERATION, "original", tmp_path / "second", split_seed=9)
    assert _tree_hash(tmp_path / "first") == _tree_hash(tmp_path / "second")


def test_different_seed_changes_split(tmp_path, corpus200, pairs):
    a = split_pair_ids(pairs, split_seed=1, train_fraction=0.75)
    b = split_pair_ids(pairs, split_seed=2, train_fraction=0.75)
    assert a != b
    assert sorted(a[0] + a[1]) == sorted(b[0] + b[1])


def test_split_of_20000_pairs_is_15000_5000():
    synthetic = [CommentPair(id=f"{i:06d}", original="r", curated="r'") for i in range(20_000)]
    train_ids, eval_ids = split_pair_ids(synthetic, split_seed=13, train_fraction=0.75)
    assert len(train_ids) == 15_000 and len(eval_ids) == 5_000
    assert set(train_ids).isdisjoint(eval_ids)


def test_manifest_contents(tmp_path, corpus200, pairs):
    export_task(corpus200, pairs, CODE_REFINEMENT, "curated", tmp_path / "m", split_seed=4)
    manifest = json.loads((tmp_path / "m" / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["finetune_metadata"] == {
        "method": "lora",
        "lora_r": 16,
        "lora_alpha": 32,
        "lora_dropout": 0.05,
        "batch_size": 4,
        "epochs": 5,
    }
    assert manifest["prompt_template_file"] == "prompt_template.txt"
    assert (tmp_path / "m" / "prompt_template.txt").exists()
    assert set(manifest["data_sha256"]) == {"train.jsonl", "eval.jsonl"}


def test_unknown_task_and_unpaired_id(tmp_path, corpus200, pairs):
    with pytest.raises(TaskExportError):
        export_task(corpus200, pairs, "bogus", "original", tmp_path, split_seed=1)
    bad = [CommentPair(id="zzzzzz", original="a", curated="b")]
    with pytest.raises(TaskExportError, match="unpaired id"):
        export_task(corpus200, bad, COMMENT_GENERATION, "original", tmp_path, split_seed=1)
