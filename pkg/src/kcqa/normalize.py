"""SQuAD-style answer normalization and exact match."""

from __future__ import annotations

import re
import string
from typing import Sequence

_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT = set(string.punctuation)


def normalize_answer(text: str) -> str:
    """Lowercase, strip punctuation, drop standalone articles, collapse whitespace."""
    lowered = text.lower()
    no_punct = "".join(ch for ch in lowered if ch not in _PUNCT)
    no_articles = _ARTICLE_RE.sub(" ", no_punct)
    return " ".join(no_articles.split())


def exact_match(prediction_text: str, golds: Sequence[str]) -> bool:
    """True iff the normalized prediction equals any normalized gold answer."""
    if not golds:
        raise ValueError("exact_match requires at least one gold answer")
    normalized = normalize_answer(prediction_text)
    return any(normalized == normalize_answer(g) for g in golds)
