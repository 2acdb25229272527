"""Canonical text processing shared by statistics, features and models.

The tokenizer is deliberately simple so that every component (vocabulary
construction, bag-of-words features, sequence encoders, length counts)
agrees on token boundaries.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z])")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace and separate punctuation.

    Each run of word characters becomes one token; every other
    non-space character becomes a standalone token.
    """
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    """Split on '. ', '! ', '? ' boundaries followed by an uppercase letter.

    The end of the text always terminates the final sentence. Empty
    input yields no sentences.
    """
    stripped = text.strip()
    if not stripped:
        return []
    parts = _SENTENCE_RE.split(stripped)
    return [p.strip() for p in parts if p.strip()]
