"""seaidx: data-series summarization, sampling, indexing, and approximate search."""

from .core import (
    ConstantSeries,
    Dataset,
    LengthMismatch,
    MalformedMeta,
    SizeMismatch,
    euclidean,
    euclidean_to_rows,
    load_dataset,
    save_dataset,
    znormalize,
    znormalize_rows,
)
from .summarization import (
    BadBits,
    BadBudget,
    BadSegmentCount,
    DegenerateEmbedding,
    ShapeMismatch,
    breakpoints,
    dea_scale,
    dft_reconstruct,
    dft_summarize,
    dft_summarize_rows,
    load_sax,
    load_summaries,
    mindist,
    paa,
    paa_distance,
    paa_rows,
    reduce_cardinality,
    save_sax,
    save_summaries,
    sax_from_paa,
)
from .sampling import (
    BadSampleSize,
    SampleSet,
    invsax,
    invsax_keys,
    invsax_order,
    load_sample,
    sax_from_invsax,
    sax_words_for,
    save_sample,
    seasam,
    uniform_sample,
)
from .index import (
    EmptyTree,
    IsaxNode,
    IsaxTree,
    QueryReport,
    UnsupportedSummarization,
    approx_query,
    build,
    exact_query_bruteforce,
    exact_query_pruned,
    ideal_tightness_curve,
    leaf_compactness,
    tightness,
)
from .evaluation import (
    BadK,
    ChiStats,
    MetricReport,
    avg_distance_diff,
    chi_stats_analytic,
    chi_stats_montecarlo,
    chi_stats_stderr,
    leaf_coverage,
    leaf_coverage_experiment,
    nn_coverage,
    random_partners,
    reconstruction_rms,
    reports_to_csv,
)
from .summarization import unit_scale
from .datagen import GenSpec, gen_fseries, gen_queries, gen_randwalk
from .datagen import generate as generate_dataset

__version__ = "0.1.0"
