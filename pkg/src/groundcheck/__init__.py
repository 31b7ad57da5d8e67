"""Grounding-consistency engine for multi-answer visual questions.

Decides whether the candidate answers to a visual question all refer to
one image region ("single" grounding) or to distinct regions ("multiple"),
by combining mask-overlap and embedding-similarity checks through a staged
rule procedure with a complete, inspectable trace.
"""

from .errors import GroundcheckError
from .geometry import (
    BitMask,
    Polygon,
    RleMask,
    decode_rle,
    encode_rle,
    iou,
    min_pairwise_iou,
    rasterize_polygon,
    visual_agreement,
)
from .reasoning import (
    Branch,
    ConsistencyDecision,
    ReasoningConfig,
    build_grounding_query,
    decide_consistency,
    run_pipeline,
)
from .semantics import (
    AnswerCandidate,
    Embedding,
    cosine_similarity,
    filter_candidates,
    is_numeric_answer,
    max_pairwise_similarity,
    normalize_answer,
    semantic_disagreement,
    toy_embed,
)
from .evaluation import EvalReport, PredictionRecord, evaluate, f1, precision, recall
from .providers import FixtureBundle, GroundingInstance, load_dataset

__version__ = "0.1.0"

__all__ = [
    "GroundcheckError",
    "BitMask",
    "Polygon",
    "RleMask",
    "decode_rle",
    "encode_rle",
    "iou",
    "min_pairwise_iou",
    "rasterize_polygon",
    "visual_agreement",
    "Branch",
    "ConsistencyDecision",
    "ReasoningConfig",
    "build_grounding_query",
    "decide_consistency",
    "run_pipeline",
    "AnswerCandidate",
    "Embedding",
    "cosine_similarity",
    "filter_candidates",
    "is_numeric_answer",
    "max_pairwise_similarity",
    "normalize_answer",
    "semantic_disagreement",
    "toy_embed",
    "EvalReport",
    "PredictionRecord",
    "evaluate",
    "f1",
    "precision",
    "recall",
    "FixtureBundle",
    "GroundingInstance",
    "load_dataset",
    "__version__",
]
