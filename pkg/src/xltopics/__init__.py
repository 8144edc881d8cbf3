"""Cross-lingual clustering topic pipeline.

Multilingual document embeddings carry dimensions that encode language
identity rather than content; clustering on them splits topics by language.
This package detects those dimensions, removes or rebalances them with
SVD-based refinement, clusters the result with seeded K-means, extracts
topic words per language, and scores topics against a comparable corpus.
"""

from .cluster import (
    ClusterAssignment,
    SeededKMeans,
    adjusted_rand_index,
    cluster_language_balance,
    kmeans_fit,
)
from .evaluation import (
    CooccurrenceModel,
    EvalReport,
    TopicEvaluation,
    aggregate_runs,
    build_cooccurrence,
    evaluate_topics,
    npmi_pair,
    topic_cnpmi,
    topic_diversity,
    topic_quality,
)
from .io import (
    FileFormatError,
    align_corpus_embeddings,
    load_comparable_pairs,
    load_corpus,
    load_embeddings,
    write_comparable_pairs,
    write_corpus,
    write_embeddings,
)
from .provider import ProviderConfig, ProviderError, fetch_embeddings
from .refine import (
    DimensionRefiner,
    LddReport,
    RefinedEmbeddings,
    REFINE_METHODS,
    export_dimension_histograms,
    ldd_t_statistics,
    refine,
    truncated_svd,
)
from .synth import SynthSpec, SynthTruth, generate_synthetic
from .topics import (
    ClusterTermCounts,
    TopicTopWords,
    TopicWordScores,
    cluster_term_counts,
    ctfidf_scores,
    render_topics_markdown,
    top_words_per_language,
)
from .types import ComparableCorpus, Corpus, Document, EmbeddingMatrix

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "ClusterTermCounts",
    "ComparableCorpus",
    "CooccurrenceModel",
    "Corpus",
    "DimensionRefiner",
    "Document",
    "EmbeddingMatrix",
    "EvalReport",
    "FileFormatError",
    "LddReport",
    "ProviderConfig",
    "ProviderError",
    "REFINE_METHODS",
    "RefinedEmbeddings",
    "SeededKMeans",
    "SynthSpec",
    "SynthTruth",
    "TopicEvaluation",
    "TopicTopWords",
    "TopicWordScores",
    "adjusted_rand_index",
    "aggregate_runs",
    "align_corpus_embeddings",
    "build_cooccurrence",
    "cluster_language_balance",
    "cluster_term_counts",
    "ctfidf_scores",
    "evaluate_topics",
    "export_dimension_histograms",
    "fetch_embeddings",
    "generate_synthetic",
    "kmeans_fit",
    "ldd_t_statistics",
    "load_comparable_pairs",
    "load_corpus",
    "load_embeddings",
    "npmi_pair",
    "refine",
    "render_topics_markdown",
    "top_words_per_language",
    "topic_cnpmi",
    "topic_diversity",
    "topic_quality",
    "truncated_svd",
    "write_comparable_pairs",
    "write_corpus",
    "write_embeddings",
]
