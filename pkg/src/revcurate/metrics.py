"""Downstream-task metrics: corpus BLEU, code-aware BLEU, and Exact Match.

BLEU here is corpus-level modified n-gram precision with a brevity penalty.
Smoothing rule (fixed, testable): when any matched count of order > 1 is
zero, every order > 1 gets +1 added to both numerator and denominator; the
unigram precision is never smoothed.

The code-aware variant combines four components: token n-gram precision,
keyword-weighted n-gram precision (keywords count 5:1), matched-subtree
ratio over the reference tree, and matched variable-use edges. Components
that cannot be computed for a language are dropped and the remaining weights
renormalized, so the combined score stays honest.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

from .grammar import (
    GrammarError,
    GrammarProvider,
    UnsupportedLanguage,
    default_provider,
    subtree_signatures,
)

MAX_NGRAM_ORDER = 4
KEYWORD_WEIGHT = 5
DEFAULT_CODEBLEU_WEIGHTS = (0.25, 0.25, 0.25, 0.25)

_CODE_TOKEN = re.compile(r"\w+|[^\w\s]")


class MetricError(ValueError):
    pass


def code_tokens(text: str) -> list[str]:
    """Split code into word and punctuation tokens."""
    return _CODE_TOKEN.findall(text)


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def _corpus_counts(
    candidates: list[list[str]],
    references: list[list[str]],
    max_n: int,
    gram_weight: Callable[[tuple[str, ...]], int],
) -> tuple[list[int], list[int]]:
    """Clipped-match numerators and candidate-count denominators per order."""
    matched = [0] * (max_n + 1)
    total = [0] * (max_n + 1)
    for cand, ref in zip(candidates, references):
        for order in range(1, max_n + 1):
            cand_counts = _ngram_counts(cand, order)
            ref_counts = _ngram_counts(ref, order)
            for gram, count in cand_counts.items():
                weight = gram_weight(gram)
                total[order] += weight * count
                matched[order] += weight * min(count, ref_counts.get(gram, 0))
    return matched, total


def _bleu_from_counts(
    matched: list[int],
    total: list[int],
    cand_len: int,
    ref_len: int,
    max_n: int,
) -> float:
    if cand_len == 0 or total[1] == 0 or matched[1] == 0:
        return 0.0

    smooth = any(matched[order] == 0 for order in range(2, max_n + 1))
    log_sum = 0.0
    for order in range(1, max_n + 1):
        numerator, denominator = matched[order], total[order]
        if order > 1 and smooth:
            numerator += 1
            denominator += 1
        if numerator == 0 or denominator == 0:
            return 0.0
        log_sum += math.log(numerator / denominator)
    geometric_mean = math.exp(log_sum / max_n)

    brevity = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * geometric_mean


def bleu(
    candidates: Sequence[str],
    references: Sequence[str],
    max_n: int = MAX_NGRAM_ORDER,
    tokenize: Callable[[str], list[str]] = str.split,
) -> float:
    """Corpus BLEU over aligned candidate/reference texts, in [0, 1]."""
    if len(candidates) != len(references):
        raise MetricError(
            f"candidate/reference counts differ: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise MetricError("empty candidate/reference lists")

    cand_tokens = [tokenize(text) for text in candidates]
    ref_tokens = [tokenize(text) for text in references]
    matched, total = _corpus_counts(cand_tokens, ref_tokens, max_n, lambda gram: 1)
    cand_len = sum(len(toks) for toks in cand_tokens)
    ref_len = sum(len(toks) for toks in ref_tokens)
    return _bleu_from_counts(matched, total, cand_len, ref_len, max_n)


@dataclass(frozen=True)
class CodeBleuResult:
    ngram: float
    weighted_ngram: float
    ast: float | None
    dataflow: float | None
    combined: float
    weights_used: tuple[float, float, float, float]
    warnings: tuple[str, ...] = ()

    def components(self) -> dict[str, float | None]:
        return {
            "ngram": self.ngram,
            "weighted_ngram": self.weighted_ngram,
            "ast": self.ast,
            "dataflow": self.dataflow,
        }


def combine_components(
    components: Sequence[float | None],
    weights: Sequence[float],
) -> tuple[float, tuple[float, ...]]:
    """Weighted sum over available components, weights renormalized.

    Unavailable (None) components contribute weight 0; the remaining weights
    are scaled to sum to 1 and reported back.
    """
    if len(components) != len(weights):
        raise MetricError("components and weights must align")
    if any(w < 0 for w in weights):
        raise MetricError("weights must be non-negative")
    live = [w if c is not None else 0.0 for c, w in zip(components, weights)]
    total = sum(live)
    if total == 0:
        raise MetricError("no scorable component has positive weight")
    normalized = tuple(w / total for w in live)
    combined = sum(w * c for w, c in zip(normalized, components) if c is not None)
    return combined, normalized


def _subtree_match(candidate_tree, reference_tree) -> float | None:
    ref_signatures = Counter(subtree_signatures(reference_tree))
    if not ref_signatures:
        return None
    cand_signatures = Counter(subtree_signatures(candidate_tree))
    matched = sum(min(count, cand_signatures.get(sig, 0)) for sig, count in ref_signatures.items())
    return matched / sum(ref_signatures.values())


def _dataflow_match(candidate_edges: frozenset, reference_edges: frozenset) -> float:
    if not reference_edges:
        return 1.0 if not candidate_edges else 0.0
    return len(candidate_edges & reference_edges) / len(reference_edges)


def codebleu(
    candidate: str,
    reference: str,
    language: str,
    weights: Sequence[float] = DEFAULT_CODEBLEU_WEIGHTS,
    grammar: GrammarProvider | None = None,
) -> CodeBleuResult:
    """Code-aware similarity of one candidate against one reference."""
    provider = grammar if grammar is not None else default_provider()
    warnings: list[str] = []

    cand_tokens = code_tokens(candidate)
    ref_tokens = code_tokens(reference)

    matched, total = _corpus_counts([cand_tokens], [ref_tokens], MAX_NGRAM_ORDER, lambda g: 1)
    ngram_score = _bleu_from_counts(
        matched, total, len(cand_tokens), len(ref_tokens), MAX_NGRAM_ORDER
    )

    try:
        keywords = provider.keywords(language)
    except UnsupportedLanguage:
        keywords = frozenset()

    def keyword_weight(gram: tuple[str, ...]) -> int:
        return KEYWORD_WEIGHT if any(tok in keywords for tok in gram) else 1

    w_matched, w_total = _corpus_counts(
        [cand_tokens], [ref_tokens], MAX_NGRAM_ORDER, keyword_weight
    )
    weighted_score = _bleu_from_counts(
        w_matched, w_total, len(cand_tokens), len(ref_tokens), MAX_NGRAM_ORDER
    )

    ast_score: float | None = None
    dataflow_score: float | None = None
    if language in provider.supported_languages():
        ref_tree = cand_tree = None
        try:
            ref_tree = provider.parse(reference, language)
        except GrammarError as exc:
            warnings.append(f"reference unparseable: {exc}")
        try:
            cand_tree = provider.parse(candidate, language)
        except GrammarError as exc:
            warnings.append(f"candidate unparseable: {exc}")

        if ref_tree is not None:
            if cand_tree is not None:
                ast_score = _subtree_match(cand_tree, ref_tree)
                if ast_score is None:
                    warnings.append("reference has no internal subtrees; ast dropped")
                dataflow_score = _dataflow_match(
                    provider.dataflow(cand_tree), provider.dataflow(ref_tree)
                )
            else:
                # Candidate failed to parse against a parseable reference:
                # that is a scoring miss, not a metric failure.
                ast_score = 0.0
                dataflow_score = 0.0
        # Both unparseable (or reference unparseable): components dropped.
    else:
        warnings.append(f"language {language!r} unsupported; ast/dataflow dropped")

    components = (ngram_score, weighted_score, ast_score, dataflow_score)
    combined, weights_used = combine_components(components, tuple(weights))
    return CodeBleuResult(
        ngram=ngram_score,
        weighted_ngram=weighted_score,
        ast=ast_score,
        dataflow=dataflow_score,
        combined=combined,
        weights_used=weights_used,  # type: ignore[arg-type]
        warnings=tuple(warnings),
    )


def normalize_diff_text(text: str) -> str:
    """CRLF/CR to LF, then strip trailing whitespace from every line."""
    unified = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in unified.split("\n"))


def exact_match(
    candidates: Sequence[str],
    references: Sequence[str],
    raw_bytes: bool = False,
) -> int:
    """Number of candidate diffs equal to their reference.

    Equality is checked after line-ending and trailing-whitespace
    normalization unless ``raw_bytes`` asks for byte-exact comparison.
    """
    if len(candidates) != len(references):
        raise MetricError(
            f"candidate/reference counts differ: {len(candidates)} vs {len(references)}"
        )
    if raw_bytes:
        return sum(1 for cand, ref in zip(candidates, references) if cand == ref)
    return sum(
        1
        for cand, ref in zip(candidates, references)
        if normalize_diff_text(cand) == normalize_diff_text(ref)
    )


@dataclass
class MetricReport:
    """Aggregate result for one evaluation run."""

    total: int
    bleu: float | None = None
    codebleu: dict | None = None
    exact_match_count: int | None = None

    def __post_init__(self):
        if self.exact_match_count is not None and self.exact_match_count > self.total:
            raise MetricError("exact-match count exceeds total")

    def to_json(self) -> dict:
        payload: dict = {"total": self.total}
        if self.bleu is not None:
            payload["bleu"] = self.bleu
            payload["bleu_x100"] = self.bleu * 100.0
        if self.codebleu is not None:
            payload["codebleu"] = self.codebleu
        if self.exact_match_count is not None:
            payload["exact_match"] = self.exact_match_count
        return payload


def corpus_codebleu(
    candidates: Sequence[str],
    references: Sequence[str],
    language: str,
    weights: Sequence[float] = DEFAULT_CODEBLEU_WEIGHTS,
    grammar: GrammarProvider | None = None,
) -> dict:
    """Mean per-pair component and combined scores, fixed summation order."""
    if len(candidates) != len(references):
        raise MetricError(
            f"candidate/reference counts differ: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise MetricError("empty candidate/reference lists")
    provider = grammar if grammar is not None else default_provider()

    results = [
        codebleu(cand, ref, language, weights, provider)
        for cand, ref in zip(candidates, references)
    ]

    def mean_of(values: list[float | None]) -> float | None:
        present = [v for v in values if v is not None]
        if not present:
            return None
        return sum(present) / len(present)

    return {
        "ngram": mean_of([r.ngram for r in results]),
        "weighted_ngram": mean_of([r.weighted_ngram for r in results]),
        "ast": mean_of([r.ast for r in results]),
        "dataflow": mean_of([r.dataflow for r in results]),
        "combined": mean_of([r.combined for r in results]),
        "weights": list(weights),
        "pairs": len(results),
    }
