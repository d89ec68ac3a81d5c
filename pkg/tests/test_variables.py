from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexivar.dataset import LogicalRow
from lexivar.errors import (
    DegenerateRangeWarning,
    NonNumericValueError,
    UnknownVariableColumnError,
)
from lexivar.variables import (
    MISSING_VALUE,
    BinScheme,
    ValueTuple,
    VariableDecl,
    assign_tuples,
    bin_values,
    deserialize_tuple,
    serialize_tuple,
    sort_values,
)


def rows_from(values: dict[str, list[str]]) -> list[LogicalRow]:
    names = list(values)
    length = len(values[names[0]])
    return [
        LogicalRow(text="x", values={n: values[n][i] for n in names})
        for i in range(length)
    ]


# --- tuple keys -------------------------------------------------------------

def test_plain_values_join_with_double_colon():
    assert serialize_tuple(("2", "black")) == "2::black"
    assert deserialize_tuple("2::black", 2) == ("2", "black")


def test_literal_double_colon_is_escaped():
    key = serialize_tuple(("a::b",))
    assert key == "a\\:\\:b"
    assert deserialize_tuple(key, 1) == ("a::b",)


def test_colon_edges_do_not_collide():
    assert serialize_tuple(("a:", "b")) != serialize_tuple(("a", ":b"))


def test_empty_tuple_deserializes_with_arity_zero():
    assert serialize_tuple(()) == ""
    assert deserialize_tuple("", 0) == ()


def test_wrong_arity_rejected():
    with pytest.raises(ValueError):
        deserialize_tuple("a::b", 3)


value_text = st.text(alphabet=st.sampled_from("ab:\\∅ x"), max_size=6)


@settings(max_examples=300, deadline=None)
@given(values=st.lists(value_text, min_size=1, max_size=4))
def test_tuple_roundtrip(values):
    key = serialize_tuple(values)
    assert deserialize_tuple(key, len(values)) == tuple(values)


@settings(max_examples=300, deadline=None)
@given(
    a=st.lists(value_text, min_size=2, max_size=2),
    b=st.lists(value_text, min_size=2, max_size=2),
)
def test_tuple_serialization_is_injective(a, b):
    if a != b:
        assert serialize_tuple(a) != serialize_tuple(b)


# --- binning ----------------------------------------------------------------

def test_bin_example():
    labels = bin_values([0.0, 10.0, 7.0], k=5)
    assert labels[2] == "[6.000000, 8.000000)"


def test_max_lands_in_last_closed_bin():
    labels = bin_values([0.0, 10.0], k=5)
    assert labels[1] == "[8.000000, 10.000000]"


def test_degenerate_range_warns_and_uses_bin_zero():
    with pytest.warns(DegenerateRangeWarning):
        labels = bin_values([4.0, 4.0, 4.0], k=3)
    assert len(set(labels)) == 1


def test_single_bin():
    labels = bin_values([1.0, 2.0, 3.0], k=1)
    assert set(labels) == {"[1.000000, 3.000000]"}


@settings(max_examples=200, deadline=None)
@given(
    values=st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=2, max_size=30
    ),
    k=st.integers(min_value=1, max_value=16),
)
def test_binning_is_monotone(values, k):
    scheme = BinScheme(min=min(values), max=max(values), k=k)
    ordered = sorted(values)
    indices = [scheme.index_of(v) for v in ordered]
    assert indices == sorted(indices)


@settings(max_examples=200, deadline=None)
@given(
    values=st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=2, max_size=30
    ),
    k=st.integers(min_value=1, max_value=8),
)
def test_doubling_bins_never_merges(values, k):
    lo, hi = min(values), max(values)
    if lo == hi:
        return
    coarse = BinScheme(min=lo, max=hi, k=k)
    fine = BinScheme(min=lo, max=hi, k=2 * k)
    for v1 in values:
        for v2 in values:
            if coarse.index_of(v1) != coarse.index_of(v2):
                assert fine.index_of(v1) != fine.index_of(v2)


def test_nonfinite_rejected():
    with pytest.raises(NonNumericValueError):
        bin_values([1.0, float("nan")], k=2)


# --- joint assignment -------------------------------------------------------

def test_single_nominal_tuple():
    rows = rows_from({"region": ["Veneto"]})
    tuples, inventories = assign_tuples(rows, [VariableDecl(name="region")])
    assert tuples[0] == ValueTuple(values=("Veneto",))
    assert inventories == {"region": ["Veneto"]}


def test_two_nominals_serialize_like_the_class_pair():
    rows = rows_from({"hatespeech": ["2"], "annotator_race": ["black"]})
    decls = [VariableDecl(name="hatespeech"), VariableDecl(name="annotator_race")]
    tuples, _ = assign_tuples(rows, decls)
    assert tuples[0].key == "2::black"


def test_binned_coordinates_produce_bin_labels():
    rows = rows_from(
        {
            "lat": ["36.0", "46.0", "41.0"],
            "lon": ["7.0", "18.0", "12.0"],
        }
    )
    decls = [
        VariableDecl(name="lat", vtype="coordinate", semantics="spatial", bins=30, axis="latitude"),
        VariableDecl(name="lon", vtype="coordinate", semantics="spatial", bins=30, axis="longitude"),
    ]
    tuples, inventories = assign_tuples(rows, decls)
    assert all(v.startswith("[") for t in tuples for v in t.values)
    assert len(inventories["lat"]) <= 30


def test_unbinned_quantitative_keeps_cell_string():
    rows = rows_from({"age": ["42", "7.5"]})
    tuples, inventories = assign_tuples(
        rows, [VariableDecl(name="age", vtype="quantitative")]
    )
    assert tuples[0].values == ("42",)
    assert inventories["age"] == ["7.5", "42"]  # numeric-aware order


def test_missing_cells_become_their_own_category():
    rows = rows_from({"label": ["A", "", "B"]})
    tuples, inventories = assign_tuples(rows, [VariableDecl(name="label")])
    assert tuples[1].values == (MISSING_VALUE,)
    assert MISSING_VALUE in inventories["label"]


def test_missing_numeric_cells_skip_binning():
    rows = rows_from({"x": ["1.0", "", "3.0"]})
    tuples, _ = assign_tuples(
        rows, [VariableDecl(name="x", vtype="quantitative", bins=2)]
    )
    assert tuples[1].values == (MISSING_VALUE,)
    assert tuples[0].values[0].startswith("[")


def test_non_numeric_cell_names_the_row():
    rows = rows_from({"x": ["1.0", "oops"]})
    with pytest.raises(NonNumericValueError) as err:
        assign_tuples(rows, [VariableDecl(name="x", vtype="quantitative")])
    assert "row 2" in str(err.value)


def test_latitude_range_enforced():
    rows = rows_from({"lat": ["95.0"]})
    decl = VariableDecl(name="lat", vtype="coordinate", semantics="spatial", axis="latitude")
    with pytest.raises(NonNumericValueError):
        assign_tuples(rows, [decl])


def test_unknown_variable_column():
    rows = rows_from({"a": ["x"]})
    with pytest.raises(UnknownVariableColumnError):
        assign_tuples(rows, [VariableDecl(name="missing")])


def test_numeric_aware_ordering():
    assert sort_values(["10", "2", "banana", "1.5"]) == ["1.5", "2", "10", "banana"]


def test_assignment_is_deterministic():
    rows = rows_from({"l": ["b", "a", "b"], "m": ["1", "2", "1"]})
    decls = [VariableDecl(name="l"), VariableDecl(name="m")]
    first = assign_tuples(rows, decls)
    second = assign_tuples(rows, decls)
    assert first == second


def test_coordinate_requires_spatial_semantics():
    with pytest.raises(ValueError):
        VariableDecl(name="lat", vtype="coordinate", semantics="general")


def test_bins_only_for_numeric_types():
    with pytest.raises(ValueError):
        VariableDecl(name="label", vtype="nominal", bins=3)
