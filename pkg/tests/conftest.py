from __future__ import annotations

import os
from collections import Counter

import pytest

from lexivar.dataset import DatasetSource
from lexivar.inspector import InspectionConfig
from lexivar.metrics import build_counts
from lexivar.units import UnitBag
from lexivar.variables import ValueTuple, VariableDecl

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
SOURCE_DIR = os.path.join(DATA_DIR, "source")
GOLDEN_DIR = os.path.join(DATA_DIR, "golden")

# Two texts, one nominal label: the smallest corpus that exercises every
# metric family. Unigram counts: N=5, f(a)=2, f(b)=2, f(c)=1,
# f(.,A)=3, f(.,B)=2.
TOY_CSV = "t,l\na b a,A\nb c,B\n"


def toy_config(metrics=("pmi", "stats"), **overrides) -> InspectionConfig:
    defaults = dict(
        source=DatasetSource(location=TOY_CSV, format="csv", inline=True),
        texts=("t",),
        variables=(VariableDecl(name="l", vtype="nominal", semantics="general"),),
        metrics=tuple(metrics),
        timestamp_zero=True,
    )
    defaults.update(overrides)
    return InspectionConfig(**defaults)


def toy_counts():
    """The toy corpus as a counts table, built row by row."""
    rows = [
        (["a", "b", "a"], "A", "a b a"),
        (["b", "c"], "B", "b c"),
    ]
    bags = [UnitBag(units=Counter(tokens), token_count=len(tokens)) for tokens, _, _ in rows]
    tuples = [ValueTuple(values=(label,)) for _, label, _ in rows]
    texts = [text for _, _, text in rows]
    return build_counts(bags, tuples, texts)


@pytest.fixture
def source_path():
    def _path(name: str) -> str:
        return os.path.join(SOURCE_DIR, name)

    return _path
