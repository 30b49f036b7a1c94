"""Occurrence scanning for answer surfaces in context text.

One match rule is used everywhere a surface is looked up in a context:
case-insensitive, delimited by word boundaries (start/end of text or a
non-alphanumeric character), longest surface first, scanning left to right
without overlaps. Keeping the rule in one place means the filter, the
substitution rewrite, and the augmentation containment check can never
disagree about what counts as an occurrence.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def _boundary_ok(text: str, start: int, end: int) -> bool:
    if start > 0 and text[start - 1].isalnum():
        return False
    if end < len(text) and text[end].isalnum():
        return False
    return True


def _candidates_fast(context: str, lowered_ctx: str, needles: Sequence[str]) -> list[tuple[int, int]]:
    cands = []
    for needle in needles:
        pos = 0
        while (i := lowered_ctx.find(needle, pos)) != -1:
            j = i + len(needle)
            if _boundary_ok(context, i, j):
                cands.append((i, -len(needle)))
            pos = i + 1
    return cands


def _candidates_slow(context: str, surfaces: Sequence[str]) -> list[tuple[int, int]]:
    # Fallback when lowercasing changes string lengths (rare Unicode cases);
    # compares per-position slices instead of offsetting into a lowered copy.
    cands = []
    for surface in surfaces:
        lowered = surface.lower()
        width = len(surface)
        for i in range(len(context) - width + 1):
            if context[i : i + width].lower() == lowered and _boundary_ok(context, i, i + width):
                cands.append((i, -width))
    return cands


def find_matches(context: str, surfaces: Iterable[str]) -> list[tuple[int, int]]:
    """Half-open spans of every occurrence of any surface, per the match rule."""
    unique: list[str] = []
    seen: set[str] = set()
    for surface in surfaces:
        lowered = surface.lower()
        if not lowered or lowered in seen:
            continue
        seen.add(lowered)
        unique.append(surface)
    if not unique:
        return []

    lowered_ctx = context.lower()
    length_safe = len(lowered_ctx) == len(context) and all(
        len(s.lower()) == len(s) for s in unique
    )
    if length_safe:
        cands = _candidates_fast(context, lowered_ctx, [s.lower() for s in unique])
    else:
        cands = _candidates_slow(context, unique)

    # Sorting on (start, -length) makes the longest surface win at each start;
    # the sweep then drops anything overlapping an earlier pick.
    cands.sort()
    matches: list[tuple[int, int]] = []
    cursor = 0
    for start, neg_len in cands:
        end = start - neg_len
        if start >= cursor:
            matches.append((start, end))
            cursor = end
    return matches


def contains_surface(context: str, surface: str) -> bool:
    """True iff the surface occurs in the context under the match rule."""
    return bool(find_matches(context, [surface]))


def replace_matches(
    context: str, matches: Sequence[tuple[int, int]], replacement: str
) -> tuple[str, list[tuple[int, int]]]:
    """Splice ``replacement`` verbatim over each match; returns new text and spans."""
    parts: list[str] = []
    spans: list[tuple[int, int]] = []
    cursor = 0
    out_len = 0
    for start, end in matches:
        parts.append(context[cursor:start])
        out_len += start - cursor
        spans.append((out_len, out_len + len(replacement)))
        parts.append(replacement)
        out_len += len(replacement)
        cursor = end
    parts.append(context[cursor:])
    return "".join(parts), spans
