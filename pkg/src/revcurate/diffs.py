"""Unified-diff hunk parsing and byte-exact re-serialization."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

CONTEXT = "context"
ADD = "add"
DEL = "del"
META = "meta"  # "\\ No newline at end of file" markers; not counted in hunk sizes

_TAG_BY_CHAR = {" ": CONTEXT, "+": ADD, "-": DEL, "\\": META}
_CHAR_BY_TAG = {tag: char for char, tag in _TAG_BY_CHAR.items()}

_HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@(.*)$")


class DiffError(ValueError):
    """Raised for diffs that do not follow the unified format."""


@dataclass(frozen=True)
class DiffLine:
    tag: str
    text: str


@dataclass(frozen=True)
class DiffHunk:
    old_start: int
    old_count: int
    new_start: int
    new_count: int
    lines: tuple[DiffLine, ...]
    # Raw header line (without newline); kept so re-serialization preserves
    # count shorthand ("-3" vs "-3,1") and any section text after the second @@.
    header: str = ""
    # False only for the final hunk of a diff whose text lacks a trailing newline.
    newline_at_end: bool = True

    def __post_init__(self):
        if not self.header:
            object.__setattr__(self, "header", format_header(self))

    def tag_counts(self) -> dict[str, int]:
        counts = {CONTEXT: 0, ADD: 0, DEL: 0, META: 0}
        for line in self.lines:
            counts[line.tag] += 1
        return counts


def format_header(hunk: DiffHunk) -> str:
    return (
        f"@@ -{hunk.old_start},{hunk.old_count} "
        f"+{hunk.new_start},{hunk.new_count} @@"
    )


def parse_unified_diff(text: str) -> list[DiffHunk]:
    """Parse hunks out of a unified diff.

    The text must start at the first ``@@`` header. Each hunk's line counts
    are validated against its header; blank lines inside a hunk must carry
    their leading context space. Raises :class:`DiffError` naming the hunk
    index on any mismatch.
    """
    if not text:
        raise DiffError("empty diff")

    trailing_newline = text.endswith("\n")
    lines = text.split("\n")
    if trailing_newline:
        lines.pop()

    hunks: list[DiffHunk] = []
    pos = 0
    while pos < len(lines):
        match = _HUNK_HEADER.match(lines[pos])
        if not match:
            raise DiffError(f"malformed hunk header in hunk {len(hunks)}: {lines[pos]!r}")
        header = lines[pos]
        old_start = int(match.group(1))
        old_count = int(match.group(2)) if match.group(2) is not None else 1
        new_start = int(match.group(3))
        new_count = int(match.group(4)) if match.group(4) is not None else 1
        pos += 1

        body: list[DiffLine] = []
        old_left, new_left = old_count, new_count
        while old_left > 0 or new_left > 0:
            if pos >= len(lines):
                raise DiffError(f"count mismatch in hunk {len(hunks)}")
            raw = lines[pos]
            tag = _TAG_BY_CHAR.get(raw[:1])
            if tag is None or (tag == META and not body):
                raise DiffError(f"unexpected line in hunk {len(hunks)}: {raw!r}")
            if tag == CONTEXT:
                old_left -= 1
                new_left -= 1
            elif tag == DEL:
                old_left -= 1
            elif tag == ADD:
                new_left -= 1
            if old_left < 0 or new_left < 0:
                raise DiffError(f"count mismatch in hunk {len(hunks)}")
            body.append(DiffLine(tag, raw[1:]))
            pos += 1
        # A no-newline marker may trail the counted lines.
        while pos < len(lines) and lines[pos].startswith("\\"):
            body.append(DiffLine(META, lines[pos][1:]))
            pos += 1

        hunks.append(
            DiffHunk(
                old_start=old_start,
                old_count=old_count,
                new_start=new_start,
                new_count=new_count,
                lines=tuple(body),
                header=header,
            )
        )

    if not trailing_newline and hunks:
        hunks[-1] = replace(hunks[-1], newline_at_end=False)
    return hunks


def serialize_hunk(hunk: DiffHunk) -> str:
    parts = [hunk.header]
    parts.extend(_CHAR_BY_TAG[line.tag] + line.text for line in hunk.lines)
    text = "\n".join(parts)
    return text + "\n" if hunk.newline_at_end else text


def serialize_hunks(hunks: list[DiffHunk]) -> str:
    """Inverse of :func:`parse_unified_diff`, byte-for-byte."""
    return "".join(serialize_hunk(h) for h in hunks)
