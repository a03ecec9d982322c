"""Text normalization: tokenization, stopword removal, suffix stemming.

Every piece of free text in the system (corpus symptom phrases, vocabulary
names, patient-reported symptoms) goes through the same normalizer, so
similarity scores are comparable across sources.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Ordered suffix-stripping table, first match wins, applied once per token.
# A rule fires only when the remaining stem keeps at least MIN_STEM chars;
# the ("ss", "ss") no-op shields words like "loss" from the plural rule.
_SUFFIX_RULES = (
    ("sses", "ss"),
    ("ies", "i"),
    ("ings", ""),
    ("ing", ""),
    ("ness", ""),
    ("ment", ""),
    ("ed", ""),
    ("ally", ""),
    ("al", ""),
    ("ly", ""),
    ("es", ""),
    ("ss", "ss"),
    ("s", ""),
    ("e", ""),
)

_MIN_STEM = 3


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled English stopword list (the test-pinned default)."""
    raw = resources.files("medreason.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in raw.split() if w)


def stem(token: str) -> str:
    """Reduce one lowercase token with the fixed suffix table."""
    for suffix, replacement in _SUFFIX_RULES:
        if token.endswith(suffix):
            kept = len(token) - len(suffix) + len(replacement)
            if kept >= _MIN_STEM:
                return token[: len(token) - len(suffix)] + replacement
            return token
    return token


def preprocess_text(raw: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords, stem each token.

    Deterministic; empty or all-stopword input yields an empty list.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = _TOKEN_RE.findall(raw.lower())
    return [stem(t) for t in tokens if t not in stopwords]


def token_set(raw: str, stopwords: frozenset[str] | None = None) -> frozenset[str]:
    """Stemmed token set of a phrase, the unit all Jaccard matching runs on."""
    return frozenset(preprocess_text(raw, stopwords))


def canonical_name(raw: str, stopwords: frozenset[str] | None = None) -> str:
    """Canonical symptom name: lowercase unstemmed tokens joined by underscores.

    Stopwords are dropped ("change in bowel movement" -> change_bowel_movement)
    but tokens are kept unstemmed so names stay readable.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = [t for t in _TOKEN_RE.findall(raw.lower()) if t not in stopwords]
    return "_".join(tokens)
