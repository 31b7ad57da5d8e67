"""Staged consistency reasoning over candidate answers, masks, and embeddings.

Given aligned (candidate, mask, embedding) triples, the decision proceeds
through filtration, a visual overlap check, a semantic similarity check,
and a numeric special case, emitting a verdict plus the complete
intermediate trace so every decision can be audited.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    AlignmentError,
    InvalidInputError,
    NotFoundError,
    ProviderError,
    ShapeMismatchError,
)
from .geometry import BitMask, iou
from .semantics import (
    DEFAULT_JUNK_ANSWERS,
    AnswerCandidate,
    Embedding,
    cosine_similarity,
    filter_candidates,
    semantic_disagreement,
)

__all__ = [
    "Branch",
    "ReasoningConfig",
    "ConsistencyDecision",
    "build_grounding_query",
    "decide_consistency",
    "run_pipeline",
]


class Branch(str, enum.Enum):
    """Which rule produced the verdict."""

    NUMERIC = "numeric"
    SEMANTIC_DISAGREEMENT = "semantic_disagreement"
    VISUAL_DEFAULT = "visual_default"
    DEGENERATE_SINGLE = "degenerate_single"


@dataclass(frozen=True)
class ReasoningConfig:
    """Thresholds and knobs for one reasoning run.

    tau_iou: minimum pairwise mask IoU for visual agreement (inclusive).
    tau_sem: similarity below which answers semantically disagree (strict).
    k: number of candidate answers requested from the proposal provider.
    junk_list: normalized answers treated as meaningless.
    lenient_embeddings: fall back to a deterministic toy embedding when an
        answer is missing from the embedding table instead of failing.
    """

    tau_iou: float = 0.5
    tau_sem: float = 0.7
    k: int = 3
    junk_list: frozenset[str] = DEFAULT_JUNK_ANSWERS
    lenient_embeddings: bool = False

    def __post_init__(self):
        if not 0.0 <= self.tau_iou <= 1.0:
            raise InvalidInputError(f"tau_iou must lie in [0, 1], got {self.tau_iou}")
        if not -1.0 <= self.tau_sem <= 1.0:
            raise InvalidInputError(f"tau_sem must lie in [-1, 1], got {self.tau_sem}")
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "junk_list", frozenset(self.junk_list))


@dataclass(frozen=True)
class ConsistencyDecision:
    """Verdict plus the full reasoning trace.

    s is 1 for a single grounding, 0 for multiple groundings. c_v and d_s
    are None when fewer than two candidates survive filtration (there are
    no pairs to compare). iou_matrix and sim_matrix cover the surviving
    candidates, symmetric with unit diagonal.
    """

    s: int
    c_v: int | None
    d_s: int | None
    all_numeric: bool
    iou_matrix: tuple[tuple[float, ...], ...]
    sim_matrix: tuple[tuple[float, ...], ...]
    branch: Branch
    kept_candidates: tuple[AnswerCandidate, ...] = field(default=())

    def min_iou(self) -> float | None:
        """Smallest off-diagonal IoU, or None with fewer than two survivors."""
        n = len(self.iou_matrix)
        if n < 2:
            return None
        return min(self.iou_matrix[i][j] for i in range(n) for j in range(i + 1, n))

    def max_sim(self) -> float | None:
        """Largest off-diagonal similarity, or None with fewer than two survivors."""
        n = len(self.sim_matrix)
        if n < 2:
            return None
        return max(self.sim_matrix[i][j] for i in range(n) for j in range(i + 1, n))

    def to_dict(self) -> dict:
        """JSON-ready form; the trace writer adds instance/config context."""
        return {
            "s": self.s,
            "c_v": self.c_v,
            "d_s": self.d_s,
            "all_numeric": self.all_numeric,
            "branch": self.branch.value,
            "iou_matrix": [list(row) for row in self.iou_matrix],
            "sim_matrix": [list(row) for row in self.sim_matrix],
            "kept_candidates": [
                {"raw": c.raw, "normalized": c.normalized, "is_numeric": c.is_numeric}
                for c in self.kept_candidates
            ],
        }


def build_grounding_query(question: str, answer: str) -> str:
    """Composite grounding query: the question and one candidate answer
    joined by a single space."""
    if not question:
        raise InvalidInputError("question must be non-empty")
    return f"{question} {answer}"


def _pairwise_matrix(items, fn) -> tuple[tuple[float, ...], ...]:
    n = len(items)
    mat = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = float(fn(items[i], items[j]))
            mat[i][j] = v
            mat[j][i] = v
    return tuple(tuple(row) for row in mat)


def decide_consistency(
    candidates: Sequence[AnswerCandidate],
    masks: Sequence[BitMask],
    embeddings: Sequence[Embedding],
    config: ReasoningConfig,
) -> ConsistencyDecision:
    """Decide whether the candidates share one grounding.

    Inputs are index-aligned, pre-filtration triples. Filtration drops a
    candidate together with its mask and embedding, so junk answers can
    never influence the pairwise statistics. With at most one survivor the
    verdict is trivially "single"; otherwise the rule order is: numeric
    candidates trust visual overlap, semantic disagreement forces
    "multiple", and everything else defers to visual overlap.
    """
    if not (len(candidates) == len(masks) == len(embeddings)):
        raise AlignmentError(
            f"aligned lists differ in length: {len(candidates)} candidates, "
            f"{len(masks)} masks, {len(embeddings)} embeddings"
        )
    shapes = {m.shape for m in masks}
    if len(shapes) > 1:
        raise ShapeMismatchError(f"masks do not share dimensions: {sorted(shapes)}")

    kept = filter_candidates(candidates, config.junk_list)
    # filter_candidates returns an ordered subsequence; match positions so a
    # duplicate candidate keeps exactly its first-occurrence mask/embedding.
    survivors = []
    next_kept = 0
    for c, m, e in zip(candidates, masks, embeddings):
        if next_kept < len(kept) and kept[next_kept] is c:
            survivors.append((c, m, e))
            next_kept += 1
    kept_candidates = tuple(c for c, _, _ in survivors)
    kept_masks = [m for _, m, _ in survivors]
    kept_embeddings = [e for _, _, e in survivors]
    all_numeric = all(c.is_numeric for c in kept_candidates)

    if len(survivors) <= 1:
        unit = ((1.0,),) if survivors else ()
        return ConsistencyDecision(
            s=1,
            c_v=None,
            d_s=None,
            all_numeric=all_numeric,
            iou_matrix=unit,
            sim_matrix=unit,
            branch=Branch.DEGENERATE_SINGLE,
            kept_candidates=kept_candidates,
        )

    iou_matrix = _pairwise_matrix(kept_masks, iou)
    sim_matrix = _pairwise_matrix(kept_embeddings, cosine_similarity)
    n = len(survivors)
    min_iou = min(iou_matrix[i][j] for i in range(n) for j in range(i + 1, n))
    max_sim = max(sim_matrix[i][j] for i in range(n) for j in range(i + 1, n))
    c_v = 1 if min_iou >= config.tau_iou else 0
    d_s = semantic_disagreement(max_sim, config.tau_sem)

    if all_numeric:
        branch, s = Branch.NUMERIC, c_v
    elif d_s == 1:
        branch, s = Branch.SEMANTIC_DISAGREEMENT, 0
    else:
        branch, s = Branch.VISUAL_DEFAULT, c_v

    return ConsistencyDecision(
        s=s,
        c_v=c_v,
        d_s=d_s,
        all_numeric=all_numeric,
        iou_matrix=iou_matrix,
        sim_matrix=sim_matrix,
        branch=branch,
        kept_candidates=kept_candidates,
    )


def gather_instance_inputs(
    instance,
    proposal_provider,
    grounding_provider,
    embedding_provider,
    config: ReasoningConfig,
) -> tuple[list[AnswerCandidate], list[BitMask], list[Embedding]]:
    """Provider stage of the pipeline: propose, filter, ground, embed.

    Filtration runs before grounding so masks and embeddings are never
    requested for junk or duplicate answers. The returned triples are
    aligned and already filtered (re-filtering is a no-op). Provider
    failures surface as ProviderError carrying the instance id.
    """
    instance_id = instance.instance_id
    try:
        texts = proposal_provider.propose(instance)
    except (ProviderError, NotFoundError):
        raise
    except Exception as exc:
        raise ProviderError(f"proposal failed: {exc}", instance_id=instance_id) from exc

    indexed = [(i, AnswerCandidate.from_raw(t)) for i, t in enumerate(texts)]
    kept = filter_candidates([c for _, c in indexed], config.junk_list)
    survivors = []
    next_kept = 0
    for i, c in indexed:
        if next_kept < len(kept) and kept[next_kept] is c:
            survivors.append((i, c))
            next_kept += 1

    masks: list[BitMask] = []
    embeddings: list[Embedding] = []
    for index, cand in survivors:
        query = build_grounding_query(instance.question, cand.raw)
        try:
            masks.append(grounding_provider.ground(instance, index, query))
        except (ProviderError, NotFoundError):
            raise
        except Exception as exc:
            raise ProviderError(
                f"grounding failed for candidate {index}: {exc}", instance_id=instance_id
            ) from exc
        try:
            embeddings.append(embedding_provider.embed(cand.normalized))
        except (ProviderError, NotFoundError):
            raise
        except Exception as exc:
            raise ProviderError(
                f"embedding failed for {cand.normalized!r}: {exc}", instance_id=instance_id
            ) from exc

    return [c for _, c in survivors], masks, embeddings


def run_pipeline(
    instance,
    proposal_provider,
    grounding_provider,
    embedding_provider,
    config: ReasoningConfig,
) -> ConsistencyDecision:
    """Full per-instance pipeline: propose answers, ground each one,
    embed each one, then decide consistency."""
    candidates, masks, embeddings = gather_instance_inputs(
        instance, proposal_provider, grounding_provider, embedding_provider, config
    )
    return decide_consistency(candidates, masks, embeddings, config)
