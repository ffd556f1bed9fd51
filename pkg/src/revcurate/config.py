"""Pipeline configuration: a single TOML file plus environment secrets."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .corpus import DEFAULT_FIELD_MAPPING
from .framework import SCORE_MAX, SCORE_MIN
from .judge import JudgeConfig
from .metrics import DEFAULT_CODEBLEU_WEIGHTS


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    corpus_path: Path | None = None
    output_dir: Path = Path("out")
    fixtures_dir: Path | None = None
    judge: JudgeConfig = field(default_factory=JudgeConfig)
    threshold: int = 4
    split_seed: int = 13
    train_fraction: float = 0.75
    pair_n: int = 50
    pair_seed: int = 17
    stratify_by_language: bool = False
    field_mapping: dict = field(default_factory=lambda: dict(DEFAULT_FIELD_MAPPING))
    codebleu_weights: tuple = DEFAULT_CODEBLEU_WEIGHTS
    service_host: str = "127.0.0.1"
    service_port: int = 8321
    static_dir: Path | None = None

    def __post_init__(self):
        if not SCORE_MIN <= self.threshold <= SCORE_MAX:
            raise ConfigError(f"threshold must be in [{SCORE_MIN}, {SCORE_MAX}]")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must be in (0, 1)")


def load_config(path: str | Path | None) -> PipelineConfig:
    """Load a TOML config; relative paths resolve against the config file."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc

    base = path.parent

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        candidate = Path(value)
        return candidate if candidate.is_absolute() else (base / candidate)

    paths = data.get("paths", {})
    judge_section = data.get("judge", {})
    judge = JudgeConfig(
        endpoint=judge_section.get("endpoint", ""),
        model=judge_section.get("model", JudgeConfig.model),
        temperature=judge_section.get("temperature", JudgeConfig.temperature),
        max_retries=judge_section.get("max_retries", JudgeConfig.max_retries),
        max_parallel=judge_section.get("max_parallel", JudgeConfig.max_parallel),
        timeout=judge_section.get("timeout_seconds", JudgeConfig.timeout),
        api_key_env=judge_section.get("api_key_env", JudgeConfig.api_key_env),
    )

    curation = data.get("curation", {})
    split_section = data.get("split", {})
    pairing = data.get("pairing", {})
    fields = {**DEFAULT_FIELD_MAPPING, **data.get("fields", {})}
    codebleu_section = data.get("codebleu", {})
    service = data.get("service", {})

    weights = codebleu_section.get("weights", list(DEFAULT_CODEBLEU_WEIGHTS))
    if len(weights) != 4 or any(w < 0 for w in weights):
        raise ConfigError("codebleu.weights must be four non-negative numbers")

    return PipelineConfig(
        corpus_path=resolve(paths.get("corpus")),
        output_dir=resolve(paths.get("outputs")) or Path("out"),
        fixtures_dir=resolve(paths.get("fixtures")),
        judge=judge,
        threshold=curation.get("threshold", 4),
        split_seed=split_section.get("seed", 13),
        train_fraction=split_section.get("train_fraction", 0.75),
        pair_n=pairing.get("n", 50),
        pair_seed=pairing.get("seed", 17),
        stratify_by_language=pairing.get("stratify_by_language", False),
        field_mapping=fields,
        codebleu_weights=tuple(weights),
        service_host=service.get("host", "127.0.0.1"),
        service_port=service.get("port", 8321),
        static_dir=resolve(service.get("static_dir")),
    )
