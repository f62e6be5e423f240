"""On-demand question answering over SPARQL endpoints."""

from ._kgqa import (
    EmbeddingStore,
    FixtureEndpoint,
    KgqaError,
    Pipeline,
    build_pgp,
    char_embed,
    classify_shape,
    encode_patterns,
    enumerate_bgps,
    evaluate,
    extract_patterns,
    filter_answers,
    is_human_readable,
    parse_model_output,
    plan,
    predict_data_type,
    predict_semantic_type,
    render_contains,
    score_bgp,
)

__all__ = [
    "EmbeddingStore",
    "FixtureEndpoint",
    "KgqaError",
    "Pipeline",
    "build_pgp",
    "char_embed",
    "classify_shape",
    "encode_patterns",
    "enumerate_bgps",
    "evaluate",
    "extract_patterns",
    "filter_answers",
    "is_human_readable",
    "parse_model_output",
    "plan",
    "predict_data_type",
    "predict_semantic_type",
    "render_contains",
    "score_bgp",
]
