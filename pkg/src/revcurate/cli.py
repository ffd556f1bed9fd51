"""Command-line front door for the curation pipeline.

Every subcommand reads and writes the documented file formats, so stages can
be rerun independently; outputs depend only on inputs, flags, and seeds.
Stage failures exit 1 with a machine-readable error summary on stderr.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import curation, jsonl, metrics, stats, taskprep
from .agreement import kappa_report, render_kappa_report
from .config import ConfigError, load_config
from .corpus import (
    CorpusError,
    import_samples,
    pair_subsets,
    read_corpus,
    write_corpus,
    write_rejects,
)
from .judge import (
    HttpBackend,
    JudgeError,
    MockBackend,
    judge_corpus,
    read_judgments,
    write_failures,
    write_judgments,
)
from .store import AnnotationStore, read_consensus


class StageFailure(click.ClickException):
    """Pipeline-stage error: exit 1 with a JSON summary on stderr."""

    exit_code = 1

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage

    def show(self, file=None) -> None:
        payload = {"error": self.message, "stage": self.stage}
        print(jsonl.dumps_record(payload), file=file or sys.stderr)


def _config(ctx: click.Context):
    try:
        return load_config(ctx.obj.get("config_path"))
    except ConfigError as exc:
        raise StageFailure("config", str(exc)) from exc


def _backend(kind: str, fixtures: str | None, config):
    if kind == "mock":
        fixtures_dir = fixtures or (config.fixtures_dir and str(config.fixtures_dir))
        if not fixtures_dir:
            raise StageFailure("judge", "mock backend requires --fixtures or paths.fixtures")
        return MockBackend(fixtures_dir)
    try:
        return HttpBackend(config.judge)
    except ValueError as exc:
        raise StageFailure("judge", str(exc)) from exc


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="TOML config file.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Curation pipeline for code-review datasets."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command("import")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--rejects", "rejects_path", type=click.Path(), default=None)
@click.pass_context
def import_cmd(ctx, in_path: str, out_path: str, rejects_path: str | None) -> None:
    """Validate raw records into a corpus; malformed ones go to the rejects file."""
    config = _config(ctx)
    try:
        result = import_samples(jsonl.iter_jsonl(in_path), config.field_mapping, source=in_path)
    except (OSError, ValueError) as exc:
        raise StageFailure("import", str(exc)) from exc
    write_corpus(result.corpus, out_path)
    if rejects_path is None:
        rejects_path = str(Path(out_path).with_suffix(".rejects.jsonl"))
    write_rejects(result.rejects, rejects_path)
    click.echo(f"imported {len(result.corpus)} samples, rejected {len(result.rejects)}")


@main.command("judge")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--failures", "failures_path", type=click.Path(), default=None)
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--fixtures", type=click.Path(), default=None, help="Mock fixture directory.")
@click.pass_context
def judge_cmd(ctx, in_path, out_path, failures_path, backend_kind, fixtures) -> None:
    """Evaluate every sample with the judge; failed samples go to the sidecar."""
    config = _config(ctx)
    backend = _backend(backend_kind, fixtures, config)
    try:
        corpus = read_corpus(in_path)
        run = judge_corpus(corpus, backend, config.judge)
    except (CorpusError, JudgeError, ValueError) as exc:
        raise StageFailure("judge", str(exc)) from exc
    write_judgments(run.judgments, out_path)
    if failures_path is None:
        failures_path = str(Path(out_path).with_suffix(".failures.jsonl"))
    write_failures(run.failures, failures_path)
    click.echo(f"judged {len(run.judgments)} samples, {len(run.failures)} failures")


@main.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--judged", "judged_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", type=int, default=None, help="Relevance threshold (default 4).")
@click.option("--kept", "kept_path", required=True, type=click.Path())
@click.option("--removed", "removed_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def filter_cmd(ctx, in_path, judged_path, threshold, kept_path, removed_path, report_path) -> None:
    """Drop samples whose relevance score is below the threshold."""
    config = _config(ctx)
    threshold = config.threshold if threshold is None else threshold
    try:
        corpus = read_corpus(in_path)
        judgments = read_judgments(judged_path)
        outcome = curation.filter_irrelevant(corpus, judgments, threshold)
    except (CorpusError, curation.MissingJudgment, ValueError) as exc:
        raise StageFailure("filter", str(exc)) from exc
    write_corpus(outcome.kept, kept_path)
    write_corpus(outcome.removed, removed_path)
    if report_path:
        jsonl.dump_json(
            {
                "total_in": len(corpus),
                "kept": len(outcome.kept),
                "removed": {"count": len(outcome.removed), "ids": outcome.removed_ids},
                "threshold": threshold,
            },
            report_path,
        )
    click.echo(f"kept {len(outcome.kept)}, removed {len(outcome.removed)}")


@main.command("curate")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True), help="Kept corpus.")
@click.option("--judged", "judged_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--quarantine", "quarantine_path", type=click.Path(), default=None)
@click.option("--removed", "removed_path", type=click.Path(exists=True), default=None,
              help="Removed corpus, for full report bookkeeping.")
@click.option("--report-prefix", "report_prefix", type=click.Path(), default=None)
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--fixtures", type=click.Path(), default=None)
@click.pass_context
def curate_cmd(
    ctx, in_path, judged_path, out_path, quarantine_path, removed_path, report_prefix,
    backend_kind, fixtures,
) -> None:
    """Reformulate kept comments, re-evaluate them, and report the evolution."""
    config = _config(ctx)
    backend = _backend(backend_kind, fixtures, config)
    try:
        kept = read_corpus(in_path)
        judgments = read_judgments(judged_path)
        run = curation.curate(kept, judgments, backend, config.judge)
        removed_ids = read_corpus(removed_path).ids() if removed_path else []
        report = curation.evolution_report(
            judgments, run.curated, removed_ids=removed_ids, quarantined=len(run.quarantined)
        )
    except (CorpusError, curation.MissingJudgment, JudgeError, ValueError) as exc:
        raise StageFailure("curate", str(exc)) from exc
    curation.write_curated(run.curated, out_path)
    if quarantine_path is None:
        quarantine_path = str(Path(out_path).with_suffix(".quarantine.jsonl"))
    write_failures(run.quarantined, quarantine_path)
    if report_prefix:
        jsonl.dump_json(curation.report_to_json(report), Path(report_prefix + ".json"))
        Path(report_prefix + ".txt").write_text(curation.render_report(report), encoding="utf-8")
    click.echo(f"curated {len(run.curated)}, quarantined {len(run.quarantined)}")


@main.command("stats")
@click.option("--judged", "judged_path", required=True, type=click.Path(exists=True))
@click.option("--out-prefix", "out_prefix", required=True, type=click.Path())
@click.pass_context
def stats_cmd(ctx, judged_path, out_prefix) -> None:
    """Category distributions, score histograms, and per-subcategory means."""
    try:
        judgments = read_judgments(judged_path)
        report = stats.build_report(judgments)
    except (stats.StatsError, ValueError) as exc:
        raise StageFailure("stats", str(exc)) from exc
    jsonl.dump_json(stats.report_to_json(report), Path(out_prefix + ".json"))
    Path(out_prefix + ".txt").write_text(stats.render_means_table(report), encoding="utf-8")
    Path(out_prefix + ".distribution.csv").write_text(stats.distribution_csv(report), encoding="utf-8")
    for criterion in stats.CRITERIA:
        Path(f"{out_prefix}.hist.{criterion}.csv").write_text(
            stats.histogram_csv(report, criterion), encoding="utf-8"
        )
    click.echo(f"stats over {report.total} judged samples written to {out_prefix}.*")


@main.command("kappa")
@click.option("--export", "export_path", required=True, type=click.Path(exists=True),
              help="Annotation export (consensus records are used).")
@click.option("--judged", "judged_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def kappa_cmd(ctx, export_path, judged_path, out_path) -> None:
    """Human/LLM agreement per category and criterion."""
    from .agreement import AgreementError

    try:
        consensus = read_consensus(export_path)
        judgments = read_judgments(judged_path)
        report = kappa_report(consensus, judgments)
    except (AgreementError, ValueError) as exc:
        raise StageFailure("kappa", str(exc)) from exc
    jsonl.dump_json(report, out_path)
    click.echo(render_kappa_report(report), nl=False)


@main.group("annotate")
def annotate_group() -> None:
    """Human annotation workflow."""


@annotate_group.command("serve")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--annotators", required=True, help="Two comma-separated annotator ids.")
@click.option("--store", "store_dir", required=True, type=click.Path())
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--static", "static_dir", type=click.Path(), default=None)
@click.pass_context
def annotate_serve(ctx, corpus_path, annotators, store_dir, host, port, static_dir) -> None:
    """Serve the annotation API (and UI assets when available)."""
    from .service import serve
    from .store import StoreError

    config = _config(ctx)
    ids = tuple(a.strip() for a in annotators.split(",") if a.strip())
    if len(ids) != 2:
        raise StageFailure("annotate", "exactly two annotator ids are required")
    try:
        corpus = read_corpus(corpus_path)
        store = AnnotationStore(store_dir, corpus, ids)  # type: ignore[arg-type]
    except (CorpusError, StoreError, ValueError) as exc:
        raise StageFailure("annotate", str(exc)) from exc
    host = host or config.service_host
    port = port if port is not None else config.service_port
    static = static_dir or (config.static_dir and str(config.static_dir))
    click.echo(f"annotation service on http://{host}:{port}")
    serve(store, host, port, static)


@main.command("export-tasks")
@click.option("--original", "original_path", required=True, type=click.Path(exists=True))
@click.option("--curated", "curated_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n", "pair_n", type=int, default=None)
@click.option("--pair-seed", type=int, default=None)
@click.option("--split-seed", type=int, default=None)
@click.option("--fraction", type=float, default=None)
@click.option("--task", "task_choice", type=click.Choice(["both", *taskprep.TASKS]), default="both")
@click.option("--stratify/--no-stratify", default=None)
@click.pass_context
def export_tasks_cmd(
    ctx, original_path, curated_path, out_dir, pair_n, pair_seed, split_seed, fraction,
    task_choice, stratify,
) -> None:
    """Export paired train/eval datasets for the downstream tasks."""
    config = _config(ctx)
    pair_n = config.pair_n if pair_n is None else pair_n
    pair_seed = config.pair_seed if pair_seed is None else pair_seed
    split_seed = config.split_seed if split_seed is None else split_seed
    fraction = config.train_fraction if fraction is None else fraction
    stratify = config.stratify_by_language if stratify is None else stratify

    try:
        original = read_corpus(original_path)
        curated = curation.read_curated(curated_path)
        pairs = pair_subsets(
            original,
            curation.curated_comments_by_id(curated),
            pair_n,
            pair_seed,
            stratify_by_language=stratify,
        )
        tasks = list(taskprep.TASKS) if task_choice == "both" else [task_choice]
        for task in tasks:
            for variant in taskprep.VARIANTS:
                manifest = taskprep.export_task(
                    original,
                    pairs,
                    task,
                    variant,
                    Path(out_dir) / task / variant,
                    split_seed=split_seed,
                    train_fraction=fraction,
                )
                click.echo(
                    f"{task}/{variant}: train {manifest.train_count}, "
                    f"eval {manifest.eval_count}, skipped {len(manifest.skipped_ids)}"
                )
    except (CorpusError, taskprep.TaskExportError, ValueError) as exc:
        raise StageFailure("export-tasks", str(exc)) from exc


@main.command("eval")
@click.option("--metric", "metric_name", required=True,
              type=click.Choice(["bleu", "codebleu", "em"]))
@click.option("--cand", "cand_path", required=True, type=click.Path(exists=True))
@click.option("--ref", "ref_path", required=True, type=click.Path(exists=True))
@click.option("--language", default="c", help="Language tag for codebleu.")
@click.option("--raw-bytes", is_flag=True, default=False, help="Byte-exact EM comparison.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_context
def eval_cmd(ctx, metric_name, cand_path, ref_path, language, raw_bytes, out_path) -> None:
    """Score candidate texts against references, aligned by id."""
    config = _config(ctx)
    try:
        candidates, references = _aligned_texts(cand_path, ref_path)
        report = metrics.MetricReport(total=len(candidates))
        if metric_name == "bleu":
            report.bleu = metrics.bleu(candidates, references)
            click.echo(f"{report.bleu:.4f}")
        elif metric_name == "codebleu":
            report.codebleu = metrics.corpus_codebleu(
                candidates, references, language, config.codebleu_weights
            )
            click.echo(f"{report.codebleu['combined']:.4f}")
        else:
            report.exact_match_count = metrics.exact_match(candidates, references, raw_bytes)
            click.echo(f"{report.exact_match_count}/{report.total}")
    except (metrics.MetricError, ValueError) as exc:
        raise StageFailure("eval", str(exc)) from exc
    if out_path:
        jsonl.dump_json(report.to_json(), out_path)


def _aligned_texts(cand_path: str, ref_path: str) -> tuple[list[str], list[str]]:
    def load(path: str) -> dict[str, str]:
        table = {}
        for record in jsonl.iter_jsonl(path):
            table[str(record["id"])] = str(record["text"])
        return table

    cand, ref = load(cand_path), load(ref_path)
    if set(cand) != set(ref):
        missing = sorted(set(cand) ^ set(ref))
        raise metrics.MetricError(f"candidate/reference ids differ: {missing[:5]}")
    ids = sorted(cand)
    if not ids:
        raise metrics.MetricError("no aligned records")
    return [cand[i] for i in ids], [ref[i] for i in ids]


if __name__ == "__main__":
    main()
