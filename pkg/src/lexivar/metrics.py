"""Count tables and the metric families computed over them.

Association metrics relate language units to the joint variable tuple of the
texts they occur in: the eight pointwise-mutual-information flavors (all
combinations of normalized / positive / weighted) and a smoothed class
relevance score with its positive / weighted variants. Diversity measures
(type-token ratio, root TTR, log TTR, Maas) and descriptive statistics are
computed per tuple.

Counting notation, used throughout: f(u,v) is the joint frequency of unit u
under tuple v, f(u) and f(v) the marginals, N the total unit count, and V
the vocabulary of distinct units.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegenerateNormalizationWarning,
    EmptyCorpusError,
    SingleClassError,
)
from .units import UnitBag
from .variables import ValueTuple

PMI_METRICS = (
    "pmi", "p_pmi", "n_pmi", "w_pmi", "np_pmi", "nw_pmi", "pw_pmi", "npw_pmi",
)
RELEVANCE_METRICS = ("relevance", "p_relevance", "w_relevance", "pw_relevance")
DIVERSITY_METRICS = ("ttr", "root_ttr", "log_ttr", "maas")
STATS_METRIC = "stats"
ALL_METRICS = PMI_METRICS + RELEVANCE_METRICS + DIVERSITY_METRICS + (STATS_METRIC,)

def metric_is_non_negative(metric_id: str) -> bool:
    """Whether a metric's scores are non-negative by construction (drives
    the chart color scale choice: sequential vs diverging)."""
    if metric_id in PMI_METRICS:
        return PmiFlavor.from_metric_id(metric_id).positive
    if metric_id in RELEVANCE_METRICS:
        return "p" in metric_id[: -len("relevance")].rstrip("_")
    return metric_id in DIVERSITY_METRICS


@dataclass(frozen=True)
class PmiFlavor:
    normalized: bool = False
    positive: bool = False
    weighted: bool = False

    @classmethod
    def from_metric_id(cls, metric_id: str) -> "PmiFlavor":
        if metric_id not in PMI_METRICS:
            raise ValueError(f"not a PMI metric id: {metric_id!r}")
        prefix = metric_id[: -len("pmi")].rstrip("_")
        return cls(
            normalized="n" in prefix,
            positive="p" in prefix,
            weighted="w" in prefix,
        )


def _digest(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()


@dataclass
class CountsTable:
    """Joint and marginal unit/tuple frequencies plus per-tuple text stats.

    Partial tables (e.g. one per row shard) merge associatively and
    commutatively; every derived quantity is a pure function of the counts,
    so the merge order can never change a score.
    """

    joint: dict[str, Counter] = field(default_factory=dict)  # tuple key -> unit -> f(u,v)
    unit_marginal: Counter = field(default_factory=Counter)
    tuple_marginal: Counter = field(default_factory=Counter)
    total: int = 0
    texts_per_tuple: Counter = field(default_factory=Counter)
    tokens_per_tuple: Counter = field(default_factory=Counter)
    # text digests per tuple; duplicates = occurrences beyond the first
    text_digests: dict[str, Counter] = field(default_factory=dict)

    @property
    def vocab(self) -> set[str]:
        return set(self.unit_marginal)

    @property
    def duplicates_per_tuple(self) -> dict[str, int]:
        return {
            key: sum(c - 1 for c in digests.values())
            for key, digests in self.text_digests.items()
        }

    def joint_count(self, unit: str, tuple_key: str) -> int:
        return self.joint.get(tuple_key, Counter())[unit]

    def add_row(self, bag: UnitBag, tup: ValueTuple, text: str) -> None:
        key = tup.key
        per_tuple = self.joint.setdefault(key, Counter())
        per_tuple.update(bag.units)
        self.unit_marginal.update(bag.units)
        n_units = sum(bag.units.values())
        self.tuple_marginal[key] += n_units
        self.total += n_units
        self.texts_per_tuple[key] += 1
        self.tokens_per_tuple[key] += bag.token_count
        self.text_digests.setdefault(key, Counter())[_digest(text)] += 1

    def merge(self, other: "CountsTable") -> "CountsTable":
        for key, units in other.joint.items():
            self.joint.setdefault(key, Counter()).update(units)
        self.unit_marginal.update(other.unit_marginal)
        self.tuple_marginal.update(other.tuple_marginal)
        self.total += other.total
        self.texts_per_tuple.update(other.texts_per_tuple)
        self.tokens_per_tuple.update(other.tokens_per_tuple)
        for key, digests in other.text_digests.items():
            self.text_digests.setdefault(key, Counter()).update(digests)
        return self


def build_counts(
    bags: Sequence[UnitBag],
    tuples: Sequence[ValueTuple],
    texts: Sequence[str],
) -> CountsTable:
    """Aggregate per-row unit bags into one counts table."""
    if not (len(bags) == len(tuples) == len(texts)):
        raise ValueError("bags, tuples and texts must cover the same rows")
    table = CountsTable()
    for bag, tup, text in zip(bags, tuples, texts):
        table.add_row(bag, tup, text)
    return table


# ScoreTable: tuple key -> unit -> score. Plain dicts keep the metric layer
# trivially serializable; iteration is always over sorted keys downstream.
ScoreTable = dict


def pmi(counts: CountsTable, flavor: PmiFlavor = PmiFlavor()) -> ScoreTable:
    """Pointwise mutual information per (unit, tuple), in the given flavor.

    base = log2( (f(u,v)/N) / ((f(u)/N) * (f(v)/N)) ), then in order:
    normalized divides by -log2(f(u,v)/N), weighted multiplies by
    f(u,v)/f(v) (the unit's in-tuple relative frequency), positive clamps
    at zero. Pairs with f(u,v) = 0 are omitted; there is no smoothing.
    """
    if counts.total == 0:
        raise EmptyCorpusError("cannot compute PMI over an empty corpus")
    n = counts.total
    scores: ScoreTable = {}
    for tuple_key in sorted(counts.joint):
        f_v = counts.tuple_marginal[tuple_key]
        per_unit: dict[str, float] = {}
        for unit in sorted(counts.joint[tuple_key]):
            f_uv = counts.joint[tuple_key][unit]
            if f_uv == 0:
                continue
            f_u = counts.unit_marginal[unit]
            score = math.log2(f_uv * n / (f_u * f_v))
            if flavor.normalized:
                denom = -math.log2(f_uv / n)
                if denom == 0.0:
                    warnings.warn(
                        f"normalization degenerate for ({unit!r}, {tuple_key!r}): "
                        "the pair accounts for the whole corpus; score set to 0",
                        DegenerateNormalizationWarning,
                    )
                    score = 0.0
                else:
                    score /= denom
            if flavor.weighted:
                score *= f_uv / f_v
            if flavor.positive:
                score = max(0.0, score)
            per_unit[unit] = score
        if per_unit:
            scores[tuple_key] = per_unit
    return scores


def class_relevance(
    counts: CountsTable,
    positive: bool = False,
    weighted: bool = False,
) -> ScoreTable:
    """Normalized class relevance of each unit for each tuple ("class").

    With |C| classes and Laplace smoothing p(u|c) = (f(u,c)+1)/(f(.,c)+|V|),
    the unit's share s(u,c) = p(u|c) / sum over classes, and the base score
    is log2(s * |C|) / log2(|C|) (zero means "no more typical of c than
    average"). Weighted multiplies by f(u,c)/max_u' f(u',c); positive clamps
    at zero. Scores are reported for every (u,c) with f(u,c) > 0.
    """
    if counts.total == 0:
        raise EmptyCorpusError("cannot compute relevance over an empty corpus")
    classes = sorted(counts.texts_per_tuple)
    if len(classes) < 2:
        raise SingleClassError(
            f"class relevance needs at least 2 classes, found {len(classes)}"
        )
    vocab_size = len(counts.vocab)
    log_c = math.log2(len(classes))

    def smoothed(unit: str, cls: str) -> float:
        f_uv = counts.joint_count(unit, cls)
        f_v = counts.tuple_marginal[cls]
        return (f_uv + 1) / (f_v + vocab_size)

    scores: ScoreTable = {}
    for cls in classes:
        units = counts.joint.get(cls, Counter())
        if not units:
            continue
        max_count = max(units.values())
        per_unit: dict[str, float] = {}
        for unit in sorted(units):
            f_uv = units[unit]
            if f_uv == 0:
                continue
            share = smoothed(unit, cls) / sum(smoothed(unit, c) for c in classes)
            score = math.log2(share * len(classes)) / log_c
            if weighted:
                score *= f_uv / max_count
            if positive:
                score = max(0.0, score)
            per_unit[unit] = score
        if per_unit:
            scores[cls] = per_unit
    return scores


def lexical_diversity(
    tuple_tokens: Mapping[str, Counter],
    measure: str,
) -> dict[str, float | None]:
    """One diversity score per tuple, from its post-preprocessing unigram
    token stream (V distinct tokens out of N).

    ttr = V/N, root_ttr = V/sqrt(N), log_ttr = ln V / ln N, and
    maas = (log10 N - log10 V) / (log10 N)^2. Streams with N <= 1 make the
    log-based measures undefined; those report null. Empty streams are not
    reported at all.
    """
    if measure not in DIVERSITY_METRICS:
        raise ValueError(f"unknown diversity measure: {measure!r}")
    out: dict[str, float | None] = {}
    for key in sorted(tuple_tokens):
        tokens = tuple_tokens[key]
        n = sum(tokens.values())
        if n == 0:
            continue
        v = len(tokens)
        if measure == "ttr":
            out[key] = v / n
        elif measure == "root_ttr":
            out[key] = v / math.sqrt(n)
        elif measure == "log_ttr":
            out[key] = math.log(v) / math.log(n) if n > 1 else None
        else:  # maas
            if n > 1:
                log_n = math.log10(n)
                out[key] = (log_n - math.log10(v)) / (log_n * log_n)
            else:
                out[key] = None
    return out


# The aggregate-over-all-tuples stats record lives under this key. Real tuple
# keys can never collide with it: missing cells map to the dedicated missing
# category, so no engine-produced value serializes to the empty string.
GLOBAL_STATS_KEY = ""


def basic_stats(counts: CountsTable) -> dict[str, dict]:
    """Descriptive statistics per tuple plus a global record.

    avg_text_length counts post-preprocessing tokens per text and is rounded
    to 2 decimals for reporting.
    """
    duplicates = counts.duplicates_per_tuple

    def record(key: str) -> dict:
        texts = counts.texts_per_tuple[key]
        tokens = counts.tokens_per_tuple[key]
        return {
            "num_texts": texts,
            "num_units": counts.tuple_marginal[key],
            "num_duplicates": duplicates.get(key, 0),
            "avg_text_length": round(tokens / texts, 2) if texts else 0.0,
            "vocab_size": sum(
                1 for c in counts.joint.get(key, Counter()).values() if c > 0
            ),
        }

    out = {key: record(key) for key in sorted(counts.texts_per_tuple)}
    total_texts = sum(counts.texts_per_tuple.values())
    out[GLOBAL_STATS_KEY] = {
        "num_texts": total_texts,
        "num_units": counts.total,
        "num_duplicates": sum(duplicates.values()),
        "avg_text_length": round(
            sum(counts.tokens_per_tuple.values()) / total_texts, 2
        )
        if total_texts
        else 0.0,
        "vocab_size": len(counts.vocab),
    }
    return out


def top_k(table: ScoreTable, k: int) -> ScoreTable:
    """Keep the k best-scoring units per tuple.

    Ties break by (score descending, unit key ascending) so the result is
    deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out: ScoreTable = {}
    for tuple_key in sorted(table):
        ranked = sorted(table[tuple_key].items(), key=lambda kv: (-kv[1], kv[0]))
        out[tuple_key] = dict(sorted(ranked[:k]))
    return out


def filter_units_in_table(table: ScoreTable, keep: Iterable[str]) -> ScoreTable:
    """Restrict a score table to an explicit unit set, dropping empty tuples."""
    keep_set = set(keep)
    out: ScoreTable = {}
    for tuple_key in sorted(table):
        kept = {u: s for u, s in table[tuple_key].items() if u in keep_set}
        if kept:
            out[tuple_key] = kept
    return out
