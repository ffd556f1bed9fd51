"""Label spaces and scoring criteria of the review-comment evaluation framework.

Every module that touches categories or scores goes through these constants,
so the framework is defined in exactly one place.
"""

from __future__ import annotations

TYPE_LABELS = ("Refactoring", "Bugfix", "Testing", "Logging", "Documentation", "Other")
NATURE_LABELS = ("Prescriptive", "Descriptive", "Clarification", "Other")
CIVILITY_LABELS = ("Civil", "Uncivil")

SCORE_MIN = 1
SCORE_MAX = 10
CRITERIA = ("relevance", "clarity", "conciseness")

# Category name -> ordered subcategory labels, in report order.
CATEGORIES = {
    "Type": TYPE_LABELS,
    "Nature": NATURE_LABELS,
    "Civility": CIVILITY_LABELS,
}

LANGUAGES = ("php", "ruby", "csharp", "c", "java", "python", "cpp", "go", "javascript")

# Common spellings found in corpus dumps, mapped onto the canonical tags.
LANGUAGE_ALIASES = {
    "c#": "csharp",
    "cs": "csharp",
    "c++": "cpp",
    "cxx": "cpp",
    "js": "javascript",
    "py": "python",
    "golang": "go",
}

_TYPE_BY_LOWER = {label.lower(): label for label in TYPE_LABELS}
_NATURE_BY_LOWER = {label.lower(): label for label in NATURE_LABELS}
_CIVILITY_BY_LOWER = {label.lower(): label for label in CIVILITY_LABELS}


def normalize_type(token: str) -> str | None:
    """Map a type token onto its canonical label, case-insensitively."""
    return _TYPE_BY_LOWER.get(token.strip().lower())


def normalize_nature(token: str) -> str | None:
    return _NATURE_BY_LOWER.get(token.strip().lower())


def normalize_civility(token: str) -> str | None:
    return _CIVILITY_BY_LOWER.get(token.strip().lower())


def normalize_language(token: str) -> str | None:
    """Canonical language tag for ``token``, or None if it is not recognized."""
    lowered = token.strip().lower()
    if lowered in LANGUAGES:
        return lowered
    return LANGUAGE_ALIASES.get(lowered)


def valid_score(value: int) -> bool:
    return SCORE_MIN <= value <= SCORE_MAX


def sort_labels(labels, order: tuple[str, ...]) -> list[str]:
    """Return ``labels`` sorted by their position in ``order`` (report order)."""
    position = {label: i for i, label in enumerate(order)}
    return sorted(labels, key=lambda lab: position[lab])
