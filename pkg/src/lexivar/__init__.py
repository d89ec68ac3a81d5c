"""lexivar: diversity and unit-variable association metrics over text
datasets, with declarative chart planning for the results."""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    TEXT_SOURCE_VARIABLE,
    AnalysisTable,
    DatasetSource,
    RawTable,
    load_dataset,
    select_columns,
)
from .units import (  # noqa: E402
    PreprocessOptions,
    TokenizerSpec,
    UnitConfig,
    UnitBag,
    build_cooccurrences,
    build_ngrams,
    preprocess,
    register_tokenizer,
    tokenize,
    unregister_tokenizer,
)
from .variables import (  # noqa: E402
    BinScheme,
    ValueTuple,
    VariableDecl,
    assign_tuples,
    bin_values,
    deserialize_tuple,
    serialize_tuple,
)
from .metrics import (  # noqa: E402
    ALL_METRICS,
    CountsTable,
    PmiFlavor,
    basic_stats,
    build_counts,
    class_relevance,
    lexical_diversity,
    pmi,
    top_k,
)
from .inspector import (  # noqa: E402
    InspectionConfig,
    ResultsDocument,
    deserialize,
    run_inspection,
    serialize,
)
from .charts import (  # noqa: E402
    ChartDocument,
    ChartPlan,
    VisualizerArgs,
    filter_units,
    plan_charts,
    render_chart,
)
