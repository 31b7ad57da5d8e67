"""Answer normalization, filtration, numeric detection, and embedding math.

The semantic half of the consistency check: candidate answers are
canonicalized, junk and duplicates are dropped, and the survivors are
compared through cosine similarity of their sentence embeddings.
"""

from __future__ import annotations

import hashlib
import re
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateEmbeddingError,
    InsufficientCandidatesError,
    InvalidInputError,
    ShapeMismatchError,
)

__all__ = [
    "AnswerCandidate",
    "Embedding",
    "DEFAULT_JUNK_ANSWERS",
    "CARDINAL_WORDS",
    "normalize_answer",
    "is_numeric_answer",
    "filter_candidates",
    "cosine_similarity",
    "max_pairwise_similarity",
    "semantic_disagreement",
    "toy_embed",
]

# Answers the proposal model emits when it has nothing useful to say.
# This is a default policy, not a fixed rule: callers may pass their own
# junk list to filter_candidates / ReasoningConfig.
DEFAULT_JUNK_ANSWERS = frozenset(
    {"unanswerable", "unsuitable", "none", "n/a", "unknown", "nothing"}
)

# Closed list of spelled-out cardinals accepted by is_numeric_answer.
CARDINAL_WORDS = frozenset(
    """zero one two three four five six seven eight nine ten
    eleven twelve thirteen fourteen fifteen sixteen seventeen eighteen
    nineteen twenty thirty forty fifty sixty seventy eighty ninety
    hundred thousand""".split()
)

# Punctuation becomes whitespace (not deleted) so compounds like
# "twenty-one" keep their token boundary after normalization.
_PUNCT_TO_SPACE = str.maketrans({ch: " " for ch in string.punctuation})
_NUMBER_TOKEN = re.compile(r"\d+(\.\d+)?")
_TOKEN_SPLIT = re.compile(r"[\s\-]+")


def normalize_answer(raw: str) -> str:
    """Canonical form of an answer: lowercase, punctuation and runs of
    whitespace collapsed to single spaces, outer whitespace removed.

    Idempotent; may return "" (filtration handles empty answers).
    """
    return " ".join(raw.lower().translate(_PUNCT_TO_SPACE).split())


def is_numeric_answer(normalized: str) -> bool:
    """True iff every token is a digit string, a decimal number, or a
    spelled-out cardinal from the closed word list.

    Tokens are split on whitespace and hyphens, so "twenty one",
    "twenty-one", "3", and "3.5" all count as numeric while any string
    containing an alphabetic token outside the list does not.
    """
    tokens = [t for t in _TOKEN_SPLIT.split(normalized) if t]
    if not tokens:
        return False
    return all(
        tok in CARDINAL_WORDS or _NUMBER_TOKEN.fullmatch(tok) is not None
        for tok in tokens
    )


@dataclass(frozen=True)
class AnswerCandidate:
    """One proposed answer with its canonical form and numeric flag."""

    raw: str
    normalized: str
    is_numeric: bool

    def __post_init__(self):
        expected = normalize_answer(self.raw)
        if self.normalized != expected:
            raise InvalidInputError(
                f"normalized form {self.normalized!r} does not match "
                f"normalize_answer({self.raw!r}) = {expected!r}"
            )
        if self.is_numeric != is_numeric_answer(self.normalized):
            raise InvalidInputError(
                f"is_numeric flag disagrees with is_numeric_answer for {self.raw!r}"
            )

    @classmethod
    def from_raw(cls, raw: str) -> "AnswerCandidate":
        normalized = normalize_answer(raw)
        return cls(raw=raw, normalized=normalized, is_numeric=is_numeric_answer(normalized))


def filter_candidates(
    candidates: Sequence[AnswerCandidate],
    junk: Iterable[str] = DEFAULT_JUNK_ANSWERS,
) -> list[AnswerCandidate]:
    """Drop meaningless and duplicate candidates, keeping first occurrences.

    A candidate is removed when its normalized form is empty, matches a
    junk entry (junk entries are themselves normalized before comparison,
    so "N/A" matches the "n/a" entry), or duplicates an earlier candidate.
    """
    junk_normalized = {normalize_answer(j) for j in junk}
    seen: set[str] = set()
    kept: list[AnswerCandidate] = []
    for cand in candidates:
        key = cand.normalized
        if not key or key in junk_normalized or key in seen:
            continue
        seen.add(key)
        kept.append(cand)
    return kept


class Embedding:
    """Fixed-dimension sentence embedding; finite, non-zero by construction."""

    __slots__ = ("_values",)

    def __init__(self, values) -> None:
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ShapeMismatchError(f"embedding must be a 1-D vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DegenerateEmbeddingError("embedding contains non-finite components")
        if float(np.linalg.norm(arr)) == 0.0:
            # catches both the zero vector and norm underflow
            raise DegenerateEmbeddingError("embedding has zero norm")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dimension(self) -> int:
        return self._values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return bool(np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"Embedding(d={self.dimension})"


def cosine_similarity(a: Embedding, b: Embedding) -> float:
    """Cosine of the angle between two embeddings, clamped to [-1, 1].

    Identical vectors score exactly 1.0 (the clamp alone cannot guarantee
    that under floating-point norm rounding).
    """
    if a.dimension != b.dimension:
        raise ShapeMismatchError(
            f"embedding dimensions differ: {a.dimension} vs {b.dimension}"
        )
    if np.array_equal(a.values, b.values):
        return 1.0
    dot = float(np.dot(a.values, b.values))
    denom = float(np.linalg.norm(a.values) * np.linalg.norm(b.values))
    if denom == 0.0:
        raise DegenerateEmbeddingError("zero-norm embedding in cosine similarity")
    return float(np.clip(dot / denom, -1.0, 1.0))


def max_pairwise_similarity(embeddings: Sequence[Embedding]) -> float:
    """Maximum cosine similarity over all unordered pairs."""
    if len(embeddings) < 2:
        raise InsufficientCandidatesError(f"need >= 2 embeddings, got {len(embeddings)}")
    best = -1.0
    for i in range(len(embeddings)):
        for j in range(i + 1, len(embeddings)):
            best = max(best, cosine_similarity(embeddings[i], embeddings[j]))
    return best


def semantic_disagreement(max_sim: float, tau_sem: float) -> int:
    """Indicator that no answer pair reaches similarity ``tau_sem``.

    Strictly-below comparison: max_sim == tau_sem is still agreement.
    """
    return 1 if max_sim < tau_sem else 0


def toy_embed(normalized: str, dimension: int) -> Embedding:
    """Deterministic unit vector derived from a stable hash of the text.

    A stand-in for a real sentence embedder: identical texts map to
    identical vectors, but there is no semantic structure whatsoever, so
    distinct texts are near-orthogonal at moderate dimensions. Intended
    for tests and lenient-mode fallback only.
    """
    if dimension < 2:
        raise InvalidInputError(f"toy embedding dimension must be >= 2, got {dimension}")
    raw = b""
    block = 0
    while len(raw) < 8 * dimension:
        raw += hashlib.sha256(f"{block}:{normalized}".encode("utf-8")).digest()
        block += 1
    words = np.frombuffer(raw[: 8 * dimension], dtype="<u8")
    vec = words.astype(np.float64) / float(2**64) * 2.0 - 1.0
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:  # astronomically unlikely; keep the contract total
        vec = np.zeros(dimension)
        vec[0] = 1.0
        norm = 1.0
    return Embedding(vec / norm)
