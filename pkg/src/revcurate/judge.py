"""Judge prompts and completion backends.

A backend turns a prompt into raw completion text. The remote backend talks
to a chat-completion HTTP endpoint with retries and exponential backoff; the
mock backend replays canned fixtures keyed by (sample id, prompt kind), which
makes the whole downstream pipeline bit-reproducible.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Protocol

import httpx

from . import jsonl, templates
from .corpus import Corpus, ReviewSample
from .parsing import (
    Judgment,
    JudgmentParseError,
    judgment_from_record,
    judgment_to_record,
    parse_judgment,
)

EVALUATION = "evaluation"
REFORMULATION = "reformulation"
# Re-running the evaluation prompt on a reformulated comment (relevance
# omitted) is its own kind so mock fixtures can answer it separately.
REEVALUATION = "reevaluation"

PROMPT_KINDS = (EVALUATION, REFORMULATION, REEVALUATION)

DEFAULT_MODEL = "llama-3.1-70b-instruct"
DEFAULT_API_KEY_ENV = "CUREV_API_KEY"


class JudgeError(Exception):
    pass


class BackendUnavailable(JudgeError):
    """All attempts failed; the last cause is chained."""


class BackendTimeout(BackendUnavailable):
    """The final attempt timed out."""


class TransportFailure(JudgeError):
    """Single-attempt failure inside a backend.

    ``retryable`` distinguishes transient faults (connection errors, 429,
    5xx) from permanent ones (missing fixture, malformed response).
    """

    def __init__(self, message: str, retryable: bool = True, timeout: bool = False):
        super().__init__(message)
        self.retryable = retryable
        self.timeout = timeout


@dataclass(frozen=True)
class JudgePrompt:
    sample_id: str
    kind: str
    system_text: str
    user_text: str

    def __post_init__(self):
        if self.kind not in PROMPT_KINDS:
            raise ValueError(f"unknown prompt kind {self.kind!r}")


@dataclass(frozen=True)
class JudgeConfig:
    endpoint: str = ""
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    max_retries: int = 3
    max_parallel: int = 4
    timeout: float = 60.0
    api_key_env: str = DEFAULT_API_KEY_ENV
    backoff_base: float = 0.5  # seconds; doubles per attempt

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class BackendResponse:
    raw_text: str
    attempt_index: int
    latency: float


class Backend(Protocol):
    def send(self, prompt: JudgePrompt) -> str: ...


def build_evaluation_prompt(sample: ReviewSample) -> JudgePrompt:
    return JudgePrompt(
        sample_id=sample.id,
        kind=EVALUATION,
        system_text=templates.EVALUATION_SYSTEM_TEXT,
        user_text=templates.render_evaluation(sample.comment, sample.diff),
    )


def build_reformulation_prompt(sample: ReviewSample) -> JudgePrompt:
    return JudgePrompt(
        sample_id=sample.id,
        kind=REFORMULATION,
        system_text=templates.REFORMULATION_SYSTEM_TEXT,
        user_text=templates.render_reformulation(sample.comment, sample.diff),
    )


def build_reevaluation_prompt(sample: ReviewSample, reformulated_comment: str) -> JudgePrompt:
    """Evaluation prompt over the reformulated comment, relevance omitted."""
    return JudgePrompt(
        sample_id=sample.id,
        kind=REEVALUATION,
        system_text=templates.EVALUATION_SYSTEM_TEXT,
        user_text=templates.render_evaluation(reformulated_comment, sample.diff, include_relevance=False),
    )


class MockBackend:
    """Replays fixture files named ``<sample_id>.<kind>.txt`` from a directory."""

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)

    def send(self, prompt: JudgePrompt) -> str:
        path = self.fixture_dir / f"{prompt.sample_id}.{prompt.kind}.txt"
        if not path.is_file():
            raise TransportFailure(f"no fixture for {path.name}", retryable=False)
        return path.read_text(encoding="utf-8")


class HttpBackend:
    """Chat-completion client; expects an OpenAI-style response shape."""

    def __init__(self, config: JudgeConfig, client: httpx.Client | None = None):
        if not config.endpoint:
            raise ValueError("remote backend requires an endpoint URL")
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)

    def send(self, prompt: JudgePrompt) -> str:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": self.config.temperature,
        }
        headers = {}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = self._client.post(self.config.endpoint, json=payload, headers=headers)
        except httpx.TimeoutException as exc:
            raise TransportFailure(f"request timed out: {exc}", timeout=True) from exc
        except httpx.HTTPError as exc:
            raise TransportFailure(f"transport error: {exc}") from exc

        if response.status_code == 429 or response.status_code >= 500:
            raise TransportFailure(f"HTTP {response.status_code}")
        if response.status_code != 200:
            raise TransportFailure(f"HTTP {response.status_code}", retryable=False)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportFailure(f"malformed completion response: {exc}", retryable=False) from exc

    def close(self) -> None:
        self._client.close()


def complete(
    backend: Backend,
    prompt: JudgePrompt,
    config: JudgeConfig,
    sleep: Callable[[float], None] = time.sleep,
) -> BackendResponse:
    """First successful completion, retrying transient failures with backoff."""
    last: TransportFailure | None = None
    for attempt in range(config.max_retries + 1):
        started = time.perf_counter()
        try:
            text = backend.send(prompt)
            return BackendResponse(raw_text=text, attempt_index=attempt, latency=time.perf_counter() - started)
        except TransportFailure as failure:
            last = failure
            if not failure.retryable or attempt >= config.max_retries:
                break
            sleep(config.backoff_base * (2**attempt))
    assert last is not None
    if last.timeout:
        raise BackendTimeout(f"{prompt.sample_id}/{prompt.kind}: {last}") from last
    raise BackendUnavailable(f"{prompt.sample_id}/{prompt.kind}: {last}") from last


@dataclass(frozen=True)
class JudgeFailure:
    id: str
    error: str
    attempts: int


@dataclass
class JudgeRun:
    judgments: dict[str, Judgment]
    failures: list[JudgeFailure]


def judge_corpus(
    corpus: Corpus,
    backend: Backend,
    config: JudgeConfig,
    sleep: Callable[[float], None] = time.sleep,
) -> JudgeRun:
    """Evaluate every sample; never drops one silently.

    At most ``config.max_parallel`` completions are in flight at a time.
    A completion whose output fails to parse is re-requested up to
    ``config.max_retries`` more times; samples that still fail land in the
    failures list (the sidecar file), keyed by id.
    """

    def judge_one(sample: ReviewSample) -> Judgment | JudgeFailure:
        prompt = build_evaluation_prompt(sample)
        attempts = 0
        last_error = ""
        for _ in range(config.max_retries + 1):
            attempts += 1
            try:
                response = complete(backend, prompt, config, sleep)
            except JudgeError as exc:
                return JudgeFailure(id=sample.id, error=str(exc), attempts=attempts)
            try:
                return parse_judgment(response.raw_text)
            except JudgmentParseError as exc:
                last_error = f"parse error: {exc}"
        return JudgeFailure(id=sample.id, error=last_error, attempts=attempts)

    samples = list(corpus)
    with ThreadPoolExecutor(max_workers=config.max_parallel) as pool:
        outcomes = list(pool.map(judge_one, samples))

    run = JudgeRun(judgments={}, failures=[])
    for sample, outcome in zip(samples, outcomes):
        if isinstance(outcome, JudgeFailure):
            run.failures.append(outcome)
        else:
            run.judgments[sample.id] = outcome
    return run


def write_judgments(judgments: Mapping[str, Judgment], path: str | Path) -> int:
    records = ({"id": sid, "judgment": judgment_to_record(judgments[sid])} for sid in sorted(judgments))
    return jsonl.dump_jsonl(records, path)


def read_judgments(path: str | Path) -> dict[str, Judgment]:
    return {record["id"]: judgment_from_record(record["judgment"]) for record in jsonl.iter_jsonl(path)}


def write_failures(failures: list[JudgeFailure], path: str | Path) -> int:
    records = ({"id": f.id, "error": f.error, "attempts": f.attempts} for f in sorted(failures, key=lambda f: f.id))
    return jsonl.dump_jsonl(records, path)
