from __future__ import annotations

import math
import random
from collections import Counter

import pytest

from lexivar.errors import (
    DegenerateNormalizationWarning,
    EmptyCorpusError,
    SingleClassError,
)
from lexivar.metrics import (
    PMI_METRICS,
    RELEVANCE_METRICS,
    CountsTable,
    PmiFlavor,
    basic_stats,
    build_counts,
    class_relevance,
    lexical_diversity,
    metric_is_non_negative,
    pmi,
    top_k,
)
from lexivar.units import UnitBag
from lexivar.variables import ValueTuple

from conftest import toy_counts
from oracles import brute_force_pmi, brute_force_relevance, random_corpus


def counts_from(rows):
    """Engine-side counts for oracle comparisons: rows of (units, label)."""
    bags = [UnitBag(units=Counter(units), token_count=len(units)) for units, _ in rows]
    tuples = [ValueTuple(values=(label,)) for _, label in rows]
    texts = [" ".join(units) for units, _ in rows]
    return build_counts(bags, tuples, texts)


# --- counting ---------------------------------------------------------------

def test_toy_counts_by_hand():
    counts = toy_counts()
    assert counts.total == 5
    assert counts.unit_marginal == Counter({"a": 2, "b": 2, "c": 1})
    assert counts.tuple_marginal == Counter({"A": 3, "B": 2})
    assert counts.joint_count("a", "A") == 2
    assert counts.vocab == {"a", "b", "c"}


def test_duplicate_texts_within_tuple():
    rows = [(["x"], "A"), (["x"], "A")]
    bags = [UnitBag(units=Counter(u), token_count=1) for u, _ in rows]
    tuples = [ValueTuple(values=(label,)) for _, label in rows]
    counts = build_counts(bags, tuples, ["same text", "same text"])
    assert counts.duplicates_per_tuple == {"A": 1}


def test_empty_corpus_slice_is_all_zero():
    counts = build_counts([], [], [])
    assert counts.total == 0
    assert counts.vocab == set()


def test_marginal_identities_hold_after_any_merge_order():
    rng = random.Random(7)
    rows = random_corpus(rng, max_rows=30)
    # split into 4 shards, merge in two different orders
    shards = [rows[i::4] for i in range(4)]
    parts = [counts_from(shard) for shard in shards]

    def merged(order):
        acc = CountsTable()
        for i in order:
            acc.merge(counts_from(shards[i]))
        return acc

    a = merged([0, 1, 2, 3])
    b = merged([3, 1, 0, 2])
    for table in (a, b):
        for key, units in table.joint.items():
            assert sum(units.values()) == table.tuple_marginal[key]
        assert sum(table.tuple_marginal.values()) == table.total
        assert sum(table.unit_marginal.values()) == table.total
    assert a.joint == b.joint
    assert a.unit_marginal == b.unit_marginal
    assert a.duplicates_per_tuple == b.duplicates_per_tuple
    del parts


# --- pmi --------------------------------------------------------------------

def test_pmi_toy_value():
    scores = pmi(toy_counts())
    assert scores["A"]["a"] == pytest.approx(math.log2(5 / 3), abs=1e-12)


def test_npmi_toy_value():
    scores = pmi(toy_counts(), PmiFlavor(normalized=True))
    expected = math.log2(5 / 3) / -math.log2(0.4)
    assert scores["A"]["a"] == pytest.approx(expected, abs=1e-12)


def test_npw_pmi_pipeline_order():
    scores = pmi(toy_counts(), PmiFlavor(normalized=True, weighted=True, positive=True))
    expected = max(0.0, (math.log2(5 / 3) / -math.log2(0.4)) * (2 / 3))
    assert scores["A"]["a"] == pytest.approx(expected, abs=1e-12)


def test_positive_pmi_clamps_negative_base():
    scores = pmi(toy_counts(), PmiFlavor(positive=True))
    # pmi(b, A) = log2(5/6) < 0
    assert scores["A"]["b"] == 0.0


def test_zero_joint_pairs_are_omitted():
    scores = pmi(toy_counts())
    assert "c" not in scores["A"]
    assert "a" not in scores["B"]


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpusError):
        pmi(build_counts([], [], []))


def test_degenerate_normalization_warns_and_scores_zero():
    counts = counts_from([(["only"], "A")])
    with pytest.warns(DegenerateNormalizationWarning):
        scores = pmi(counts, PmiFlavor(normalized=True))
    assert scores["A"]["only"] == 0.0


def test_all_pmi_flavors_match_bruteforce_oracle():
    rng = random.Random(42)
    for _ in range(25):
        rows = random_corpus(rng)
        counts = counts_from(rows)
        for metric_id in PMI_METRICS:
            flavor = PmiFlavor.from_metric_id(metric_id)
            got = pmi(counts, flavor)
            expected = brute_force_pmi(
                rows,
                normalized=flavor.normalized,
                positive=flavor.positive,
                weighted=flavor.weighted,
            )
            for (unit, label), score in expected.items():
                assert got[label][unit] == pytest.approx(score, abs=1e-9), (
                    metric_id, unit, label,
                )


def test_duplicating_the_corpus_leaves_pmi_unchanged():
    rng = random.Random(3)
    rows = random_corpus(rng, max_rows=20)
    base = pmi(counts_from(rows), PmiFlavor(normalized=True, weighted=True))
    doubled = pmi(counts_from(rows + rows), PmiFlavor(normalized=True, weighted=True))
    for label, units in base.items():
        for unit, score in units.items():
            assert doubled[label][unit] == pytest.approx(score, abs=1e-12)


# --- class relevance --------------------------------------------------------

def test_relevance_toy_value():
    scores = class_relevance(toy_counts())
    # p~(a|A)=3/6, p~(a|B)=1/5, share=0.714286, log2(1.428571)/log2(2)
    assert scores["A"]["a"] == pytest.approx(0.5145731728297582, abs=1e-9)


def test_relevance_symmetric_unit_scores_zero():
    rows = [(["x", "y"], "A"), (["x", "z"], "B")]
    scores = class_relevance(counts_from(rows))
    assert scores["A"]["x"] == pytest.approx(0.0, abs=1e-12)
    assert scores["B"]["x"] == pytest.approx(0.0, abs=1e-12)


def test_positive_relevance_clamps():
    scores = class_relevance(toy_counts(), positive=True)
    assert all(s >= 0.0 for units in scores.values() for s in units.values())


def test_single_class_rejected():
    with pytest.raises(SingleClassError):
        class_relevance(counts_from([(["x"], "A"), (["y"], "A")]))


def test_relevance_variants_match_bruteforce_oracle():
    rng = random.Random(99)
    for _ in range(25):
        rows = random_corpus(rng)
        counts = counts_from(rows)
        for metric_id in RELEVANCE_METRICS:
            prefix = metric_id[: -len("relevance")].rstrip("_")
            got = class_relevance(
                counts, positive="p" in prefix, weighted="w" in prefix
            )
            expected = brute_force_relevance(
                rows, positive="p" in prefix, weighted="w" in prefix
            )
            for (unit, label), score in expected.items():
                assert got[label][unit] == pytest.approx(score, abs=1e-9), (
                    metric_id, unit, label,
                )


def test_relevance_approaches_unsmoothed_value_under_duplication():
    rows = [(["x", "x", "y"], "A"), (["y", "z"], "B")]

    def unsmoothed(unit, label, corpus):
        return brute_force_relevance(corpus, smoothing=1e-12)[(unit, label)]

    target = unsmoothed("x", "A", rows)
    gaps = []
    for factor in (1, 2, 4, 8, 16):
        scores = class_relevance(counts_from(rows * factor))
        gaps.append(abs(scores["A"]["x"] - target))
    assert all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 1))


# --- diversity --------------------------------------------------------------

def tokens_for(streams: dict[str, list[str]]):
    return {key: Counter(tokens) for key, tokens in streams.items()}


def test_diversity_values():
    streams = tokens_for({"A": ["a", "b", "a"]})
    assert lexical_diversity(streams, "ttr")["A"] == pytest.approx(2 / 3, abs=1e-9)
    assert lexical_diversity(streams, "root_ttr")["A"] == pytest.approx(
        2 / math.sqrt(3), abs=1e-9
    )
    assert lexical_diversity(streams, "log_ttr")["A"] == pytest.approx(
        math.log(2) / math.log(3), abs=1e-9
    )
    expected_maas = (math.log10(3) - math.log10(2)) / (math.log10(3) ** 2)
    assert lexical_diversity(streams, "maas")["A"] == pytest.approx(
        expected_maas, abs=1e-9
    )


def test_all_distinct_tokens():
    streams = tokens_for({"A": ["a", "b", "c"]})
    assert lexical_diversity(streams, "ttr")["A"] == pytest.approx(1.0)
    assert lexical_diversity(streams, "maas")["A"] == pytest.approx(0.0, abs=1e-12)


def test_all_identical_tokens():
    streams = tokens_for({"A": ["a"] * 5})
    assert lexical_diversity(streams, "ttr")["A"] == pytest.approx(1 / 5)
    assert lexical_diversity(streams, "log_ttr")["A"] == pytest.approx(0.0, abs=1e-12)


def test_single_token_stream_reports_null_for_log_measures():
    streams = tokens_for({"A": ["solo"]})
    assert lexical_diversity(streams, "log_ttr")["A"] is None
    assert lexical_diversity(streams, "maas")["A"] is None
    assert lexical_diversity(streams, "ttr")["A"] == pytest.approx(1.0)


def test_empty_stream_not_reported():
    streams = {"A": Counter()}
    assert lexical_diversity(streams, "ttr") == {}


# --- stats ------------------------------------------------------------------

def test_toy_stats_per_tuple_and_global():
    stats = basic_stats(toy_counts())
    assert stats["A"] == {
        "num_texts": 1,
        "num_units": 3,
        "num_duplicates": 0,
        "avg_text_length": 3.0,
        "vocab_size": 2,
    }
    assert stats[""]["num_texts"] == 2
    assert stats[""]["vocab_size"] == 3
    assert stats[""]["avg_text_length"] == 2.5


# --- top-k ------------------------------------------------------------------

def test_top_k_tie_breaks_on_unit_key():
    table = {"T": {"a": 0.9, "b": 0.5, "c": 0.5}}
    assert set(top_k(table, 2)["T"]) == {"a", "b"}


def test_top_k_larger_than_unit_count():
    table = {"T": {"a": 0.9, "b": 0.5}}
    assert top_k(table, 20) == table


def test_range_invariants_over_random_corpora():
    rng = random.Random(2024)
    for _ in range(20):
        rows = random_corpus(rng)
        counts = counts_from(rows)
        n_scores = pmi(counts, PmiFlavor(normalized=True))
        for units in n_scores.values():
            for score in units.values():
                assert -1.0 <= score <= 1.0
        for metric_id in PMI_METRICS + RELEVANCE_METRICS:
            if not metric_is_non_negative(metric_id):
                continue
            if metric_id in PMI_METRICS:
                table = pmi(counts, PmiFlavor.from_metric_id(metric_id))
            else:
                prefix = metric_id[: -len("relevance")].rstrip("_")
                table = class_relevance(
                    counts, positive=True, weighted="w" in prefix
                )
            for units in table.values():
                for score in units.values():
                    assert score >= 0.0
        rel = class_relevance(counts)
        for units in rel.values():
            for score in units.values():
                assert score <= 1.0 + 1e-12
        streams = {
            label: Counter()
            for _, label in rows
        }
        for units, label in rows:
            streams[label].update(units)
        for score in lexical_diversity(streams, "ttr").values():
            assert 0.0 < score <= 1.0
