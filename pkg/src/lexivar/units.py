"""Turning text cells into countable language units.

The pipeline per text is tokenize -> preprocess -> unit construction, where
units are contiguous n-grams or windowed co-occurrences of the surviving
tokens. All functions here are pure; texts can be processed concurrently.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

from .errors import (
    InvalidTokenError,
    StopwordFileNotFoundError,
    UnknownTokenizerError,
    WindowTooSmallError,
)

UNIT_JOINER = " "

# Code points carrying the Unicode White_Space property. str.split() is close
# but also breaks on a few control characters outside that property, so the
# splitter is pinned to the exact set.
_WHITESPACE_RANGES = (
    "\t\n\x0b\x0c\r"
    " \x85\xa0 "
    " - "
    "    　"
)
_WHITESPACE_RUN = re.compile(f"[{_WHITESPACE_RANGES}]+")

_TOKENIZER_REGISTRY: dict[str, Callable[[str], list[str]]] = {}


def register_tokenizer(custom_id: str, fn: Callable[[str], list[str]]) -> None:
    """Register a custom tokenizer: a pure function text -> ordered token list.

    Custom tokenizers must not emit tokens containing spaces (unit keys join
    tokens with a space) or empty tokens.
    """
    _TOKENIZER_REGISTRY[custom_id] = fn


def unregister_tokenizer(custom_id: str) -> None:
    _TOKENIZER_REGISTRY.pop(custom_id, None)


@dataclass(frozen=True)
class TokenizerSpec:
    kind: str = "default_whitespace"
    custom_id: str | None = None

    def __post_init__(self):
        if self.kind not in ("default_whitespace", "custom"):
            raise ValueError(f"unknown tokenizer kind: {self.kind!r}")
        if (self.kind == "custom") != (self.custom_id is not None):
            raise ValueError("custom_id must be set exactly when kind='custom'")


@dataclass(frozen=True)
class PreprocessOptions:
    lowercase: bool = False
    stopword_files: tuple[str, ...] = ()
    extra_stopwords: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stopword_files", tuple(self.stopword_files))
        object.__setattr__(self, "extra_stopwords", tuple(self.extra_stopwords))


@dataclass(frozen=True)
class UnitConfig:
    """How tokens become units: contiguous n-grams or windowed co-occurrences.

    For co-occurrences, a unit is any combination of ``n`` token positions
    whose span fits in ``window`` positions; its key is order-insensitive.
    ``dedup_same_surface`` discards combinations with repeated surface forms.
    """

    mode: str = "ngram"
    n: int = 1
    window: int | None = None
    dedup_same_surface: bool = False

    def __post_init__(self):
        if self.mode not in ("ngram", "cooccurrence"):
            raise ValueError(f"unknown unit mode: {self.mode!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.mode == "ngram" and self.window is not None:
            raise ValueError("window applies to cooccurrence mode only")
        if self.mode == "cooccurrence":
            if self.window is None:
                raise ValueError("cooccurrence mode requires a window")
            if self.window < self.n:
                raise WindowTooSmallError(
                    f"window {self.window} is smaller than n={self.n}"
                )


@dataclass
class UnitBag:
    """Multiset of unit keys for one text, plus its surviving token count."""

    units: Counter = field(default_factory=Counter)
    token_count: int = 0


def tokenize(text: str, spec: TokenizerSpec | None = None) -> list[str]:
    """Split a text into tokens.

    The default tokenizer splits on maximal runs of Unicode whitespace and
    preserves the original characters of each token, so it works across
    scripts rather than assuming Latin conventions.
    """
    spec = spec or TokenizerSpec()
    if spec.kind == "default_whitespace":
        return [t for t in _WHITESPACE_RUN.split(text) if t]
    fn = _TOKENIZER_REGISTRY.get(spec.custom_id or "")
    if fn is None:
        raise UnknownTokenizerError(f"no tokenizer registered as {spec.custom_id!r}")
    tokens = list(fn(text))
    for tok in tokens:
        if tok == "" or " " in tok:
            raise InvalidTokenError(
                f"tokenizer {spec.custom_id!r} produced invalid token {tok!r} "
                "(tokens must be non-empty and space-free)"
            )
    return tokens


def load_stopword_file(path: str) -> set[str]:
    """Read a newline-delimited stopword file: lines trimmed, blanks and
    ``#`` comments ignored."""
    if not os.path.isfile(path):
        raise StopwordFileNotFoundError(f"stopword file not found: {path}")
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word)
    return words


def merged_stopwords(opts: PreprocessOptions) -> set[str]:
    merged: set[str] = set()
    for path in opts.stopword_files:
        merged |= load_stopword_file(path)
    merged |= set(opts.extra_stopwords)
    if opts.lowercase:
        merged = {w.lower() for w in merged}
    return merged


def preprocess(
    tokens: Sequence[str],
    opts: PreprocessOptions,
    stopwords: set[str] | None = None,
) -> list[str]:
    """Lowercase and/or drop stopwords, preserving token order.

    Stopword matching is exact and happens after lowercasing (the stopword
    set is folded the same way so user lists behave predictably). Pass a
    precomputed ``stopwords`` set to avoid re-reading files per text.
    """
    if stopwords is None:
        stopwords = merged_stopwords(opts)
    out = list(tokens)
    if opts.lowercase:
        out = [t.lower() for t in out]
    if stopwords:
        out = [t for t in out if t not in stopwords]
    return out


def build_ngrams(tokens: Sequence[str], n: int) -> UnitBag:
    """Count contiguous n-grams; keys join the tokens with a single space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    units = Counter(
        UNIT_JOINER.join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
    )
    return UnitBag(units=units, token_count=len(tokens))


def build_cooccurrences(tokens: Sequence[str], cfg: UnitConfig) -> UnitBag:
    """Count windowed co-occurrences of ``cfg.n`` tokens.

    A combination of positions i1 < ... < in qualifies when in - i1 <=
    window - 1 (span measured on the preprocessed sequence). Keys sort the
    surface forms lexicographically, making unit identity order-insensitive.
    """
    if cfg.mode != "cooccurrence":
        raise ValueError("build_cooccurrences requires cooccurrence mode")
    window = cfg.window or cfg.n
    units: Counter = Counter()
    for first in range(len(tokens)):
        reachable = range(first + 1, min(first + window, len(tokens)))
        for rest in combinations(reachable, cfg.n - 1):
            surfaces = [tokens[first]] + [tokens[j] for j in rest]
            if cfg.dedup_same_surface and len(set(surfaces)) != len(surfaces):
                continue
            units[UNIT_JOINER.join(sorted(surfaces))] += 1
    return UnitBag(units=units, token_count=len(tokens))


def build_units(tokens: Sequence[str], cfg: UnitConfig) -> UnitBag:
    if cfg.mode == "ngram":
        return build_ngrams(tokens, cfg.n)
    return build_cooccurrences(tokens, cfg)
