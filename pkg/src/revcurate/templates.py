"""Prompt templates for comment evaluation, re-evaluation, and reformulation.

Prompt text is assembled from the framework's label spaces plus fixed
instruction blocks, so building a prompt is a pure function of
(comment, diff, template version). The embedded comment and diff are wrapped
in sentinel delimiters chosen to never collide with the content, which makes
the embedding reversible (see :func:`extract_embedded`).
"""

from __future__ import annotations

import re

TEMPLATE_VERSION = "1"

EVALUATION_SYSTEM_TEXT = (
    "You are an experienced software engineer who reviews code changes and "
    "evaluates the quality of code review comments. Follow the instructions "
    "exactly and respect the requested output format."
)

REFORMULATION_SYSTEM_TEXT = (
    "You are an experienced software engineer who rewrites code review "
    "comments to improve their quality. Follow the instructions exactly and "
    "respect the requested output format."
)

GENERATION_INSTRUCTION = """### Code review comment generation

Generate a review comment that you consider perfect for the code change without considering the given input comment. A review comment should highlight the main issues, improvements, or suggestions for the code changes. The generated review comment should be concise, relevant, clear, useful, and complete."""

ASSESSMENT_PREAMBLE = """### Code review comment assessment

Then, evaluate and categorize only the given review comment, written by a reviewer, based on the below criteria. You can use the generated review comment as a reference to evaluate the given review comment. Note that multiple labels are allowed for the categories "Type" and "Nature"."""

TYPE_INSTRUCTION = """Type: Categorize the review according to the type of issue it addresses: Refactoring, Bugfix, Testing, Logging, Documentation, Other."""

NATURE_INSTRUCTION = """Nature: Specify the nature of the review according to these categories:
- Descriptive: describe what the reviewer observes without explicitly suggesting specific actions.
- Prescriptive: suggest or request specific actions on the code.
- Clarification: request explanation or further information to better understand the code changes.
- Other: for comments that do not fit the previous categories."""

CIVILITY_INSTRUCTION = """Civility: Judge the tone of the review comment:
- Civil: respectful and professional tone.
- Uncivil: disrespectful or inappropriate tone."""

CONCISENESS_INSTRUCTION = """Conciseness: Assess how effectively the comment conveys its message using the fewest necessary words while remaining fully informative. A concise comment should be completely brief but informative, avoiding unnecessary details, repetition, or verbosity. Use a 1-to-10 rating scale."""

CLARITY_INSTRUCTION = """Clarity: Assess how clearly the review comment communicates its message. A score of 1 indicates very unclear, and 10 indicates very clear communication. Use a 1-to-10 rating scale."""

RELEVANCE_INSTRUCTION = """Relevance: Evaluate the extent to which the review comment is pertinent to the code change. A score of 1 means the comment is completely irrelevant, while a score of 10 means it is highly relevant. Use a 1-to-10 rating scale."""

RATIONALE_INSTRUCTION = """Finally, provide a rationale for each evaluation: one short paragraph explaining the labels and the scores you assigned."""

REFORMULATION_INSTRUCTION = """### Review comment reformulation

Your task is to reformulate and improve the given review comment by making it civil, more clear, and more concise without changing its core message or intent. The reformulated comment should respect the following guidelines:

1. Conciseness: The comment should convey its message in the fewest words necessary while still being informative. Eliminate redundancy and irrelevant details.

2. Clarity: Ensure the comment is straightforward, well-structured, and grammatically correct, making the feedback easy to understand without any ambiguity.

3. Civility: Keep the comment respectful, professional, and constructive, avoiding any harsh or inappropriate language."""

COMMENT_LABEL = "REVIEW_COMMENT"
DIFF_LABEL = "CODE_DIFF"


def _schema_lines(include_relevance: bool) -> list[str]:
    lines = [
        'REFERENCE_COMMENT: "<the perfect review comment you generated, as one JSON-quoted line>"',
        "TYPE: <comma-separated labels among Refactoring, Bugfix, Testing, Logging, Documentation, Other>",
        "NATURE: <comma-separated labels among Prescriptive, Descriptive, Clarification, Other>",
        "CIVILITY: <Civil or Uncivil>",
    ]
    if include_relevance:
        lines.append("RELEVANCE: <integer from 1 to 10>")
    lines.extend(
        [
            "CLARITY: <integer from 1 to 10>",
            "CONCISENESS: <integer from 1 to 10>",
            'RATIONALE: "<your rationale, as one JSON-quoted line>"',
        ]
    )
    return lines


def _evaluation_output_format(include_relevance: bool) -> str:
    schema = "\n".join(_schema_lines(include_relevance))
    return (
        "### Output format\n\n"
        "Respond with exactly one fenced block of KEY: value lines shaped like this:\n\n"
        "```\n" + schema + "\n```\n\n"
        "Keep REFERENCE_COMMENT and RATIONALE each on a single line, quoted as JSON strings."
    )


REFORMULATION_OUTPUT_FORMAT = """### Output format

Respond with exactly one fenced block containing only the reformulated review comment:

```
<the reformulated review comment>
```"""


def embed_block(label: str, content: str) -> str:
    """Wrap ``content`` in sentinel lines that are guaranteed not to occur in it.

    The sentinel pair is ``<<<LABEL`` / ``LABEL>>>``, extended with ``=`` signs
    until neither matches a line of the content, so any comment or diff (even
    one quoting the sentinels) embeds unambiguously.
    """
    content_lines = set(content.split("\n"))
    suffix = ""
    while f"<<<{label}{suffix}" in content_lines or f"{label}{suffix}>>>" in content_lines:
        suffix += "="
    return f"<<<{label}{suffix}\n{content}\n{label}{suffix}>>>"


def extract_embedded(text: str, label: str) -> str:
    """Recover the content embedded by :func:`embed_block`."""
    lines = text.split("\n")
    open_re = re.compile(rf"^<<<{re.escape(label)}(=*)$")
    for i, line in enumerate(lines):
        match = open_re.match(line)
        if not match:
            continue
        closer = f"{label}{match.group(1)}>>>"
        for j in range(i + 1, len(lines)):
            if lines[j] == closer:
                return "\n".join(lines[i + 1 : j])
        raise ValueError(f"unterminated {label} block")
    raise ValueError(f"no {label} block found")


def _inputs_section(comment: str, diff: str) -> str:
    return (
        "### Given review comment\n"
        + embed_block(COMMENT_LABEL, comment)
        + "\n\n### Code changes\n"
        + embed_block(DIFF_LABEL, diff)
    )


def render_evaluation(comment: str, diff: str, include_relevance: bool = True) -> str:
    """User text for judging one review comment against the framework."""
    instructions = [TYPE_INSTRUCTION, NATURE_INSTRUCTION, CIVILITY_INSTRUCTION, CONCISENESS_INSTRUCTION, CLARITY_INSTRUCTION]
    if include_relevance:
        instructions.append(RELEVANCE_INSTRUCTION)
    numbered = "\n\n".join(f"{i}. {text}" for i, text in enumerate(instructions, start=1))
    return "\n\n".join(
        [
            GENERATION_INSTRUCTION,
            ASSESSMENT_PREAMBLE,
            numbered,
            RATIONALE_INSTRUCTION,
            _evaluation_output_format(include_relevance),
            _inputs_section(comment, diff),
        ]
    )


def render_reformulation(comment: str, diff: str) -> str:
    """User text for rewriting one review comment."""
    return "\n\n".join(
        [
            REFORMULATION_INSTRUCTION,
            REFORMULATION_OUTPUT_FORMAT,
            _inputs_section(comment, diff),
        ]
    )
