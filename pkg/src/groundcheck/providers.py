"""Pluggable sources for answer proposals, grounding masks, and embeddings.

Three provider roles feed the pipeline: a proposal provider (candidate
answers for an instance), a grounding provider (one mask per candidate),
and an embedding provider (one vector per normalized answer). The default
implementations read precomputed fixture files so a full run needs no
model weights or network; a remote client speaking a small JSON protocol
covers live inference services.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import requests

from .errors import (
    DegenerateEmbeddingError,
    DuplicateIdError,
    MalformedDatasetError,
    NotFoundError,
    ProviderError,
    ShapeMismatchError,
)
from .geometry import BitMask, Polygon, RleMask, decode_rle, rasterize_polygon
from .semantics import Embedding, toy_embed

__all__ = [
    "GroundingInstance",
    "load_dataset",
    "FixtureBundle",
    "FixtureProposalProvider",
    "FixtureGroundingProvider",
    "EmbeddingTable",
    "TableEmbeddingProvider",
    "RemoteClient",
    "RemoteProposalProvider",
    "RemoteGroundingProvider",
    "RemoteEmbeddingProvider",
    "ToyProposalProvider",
    "ToyGroundingProvider",
    "ToyEmbeddingProvider",
]

GOLD_LABELS = ("single", "multiple")
SUBSETS = ("vqav2", "vizwiz", "other")

# Fallback dimension when lenient mode must invent vectors but the table
# is empty and offers no dimension to match.
DEFAULT_TOY_DIMENSION = 32


@dataclass(frozen=True)
class GroundingInstance:
    """One (image, question) evaluation item.

    Pixel data stays out of scope: image_height/image_width only anchor
    the mask grid. gold_label is None for unlabeled items.
    """

    instance_id: str
    image_id: str
    question: str
    image_height: int
    image_width: int
    gold_label: str | None = None
    subset: str = "other"

    def __post_init__(self):
        if self.image_height < 1 or self.image_width < 1:
            raise MalformedDatasetError(
                f"instance {self.instance_id!r}: image dimensions must be >= 1"
            )
        if self.gold_label is not None and self.gold_label not in GOLD_LABELS:
            raise MalformedDatasetError(
                f"instance {self.instance_id!r}: gold_label must be one of "
                f"{GOLD_LABELS}, got {self.gold_label!r}"
            )
        if self.subset not in SUBSETS:
            raise MalformedDatasetError(
                f"instance {self.instance_id!r}: subset must be one of "
                f"{SUBSETS}, got {self.subset!r}"
            )


def _iter_jsonl(path) -> Iterable[tuple[int, dict]]:
    """Yield (1-based line number, parsed record) for non-blank lines."""
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedDatasetError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        if not isinstance(record, dict):
            raise MalformedDatasetError("record must be a JSON object", line=lineno)
        yield lineno, record


def load_dataset(path) -> list[GroundingInstance]:
    """Read a line-delimited dataset file, preserving record order.

    Unknown fields are ignored; schema violations are hard errors naming
    the offending line.
    """
    instances: list[GroundingInstance] = []
    seen: set[str] = set()
    for lineno, record in _iter_jsonl(path):
        for key in ("instance_id", "image_id", "question", "image_height", "image_width"):
            if key not in record:
                raise MalformedDatasetError(f"missing required field {key!r}", line=lineno)
        try:
            instance = GroundingInstance(
                instance_id=str(record["instance_id"]),
                image_id=str(record["image_id"]),
                question=str(record["question"]),
                image_height=int(record["image_height"]),
                image_width=int(record["image_width"]),
                gold_label=record.get("gold_label"),
                subset=record.get("subset", "other"),
            )
        except MalformedDatasetError as exc:
            raise MalformedDatasetError(str(exc), line=lineno) from exc
        if instance.instance_id in seen:
            raise DuplicateIdError(
                f"line {lineno}: duplicate instance_id {instance.instance_id!r}"
            )
        seen.add(instance.instance_id)
        instances.append(instance)
    return instances


def decode_mask_entry(entry: dict, height: int, width: int) -> BitMask:
    """Decode one fixture mask entry (polygon or RLE form) at the given grid.

    The entry's own height/width must match the instance grid; silent
    resampling is never attempted.
    """
    if "polygon" in entry:
        eh, ew = int(entry["height"]), int(entry["width"])
        if (eh, ew) != (height, width):
            raise ShapeMismatchError(
                f"mask entry is {eh}x{ew} but instance grid is {height}x{width}"
            )
        return rasterize_polygon(Polygon(entry["polygon"]), height, width)
    if "rle" in entry:
        rle = entry["rle"]
        mask = decode_rle(RleMask(rle["height"], rle["width"], rle["counts"]))
        if mask.shape != (height, width):
            raise ShapeMismatchError(
                f"mask entry is {mask.height}x{mask.width} but instance grid "
                f"is {height}x{width}"
            )
        return mask
    raise MalformedDatasetError("mask entry has neither 'polygon' nor 'rle' form")


class FixtureBundle:
    """Precomputed per-instance candidates and masks, loaded from one file.

    Read-only after load; safe for unlimited concurrent reads.
    """

    def __init__(self, entries: dict[str, dict]):
        self._entries = entries

    @classmethod
    def load(cls, path) -> "FixtureBundle":
        entries: dict[str, dict] = {}
        for lineno, record in _iter_jsonl(path):
            for key in ("instance_id", "candidates", "masks"):
                if key not in record:
                    raise MalformedDatasetError(f"missing required field {key!r}", line=lineno)
            instance_id = str(record["instance_id"])
            if instance_id in entries:
                raise DuplicateIdError(
                    f"line {lineno}: duplicate instance_id {instance_id!r}"
                )
            candidates = [str(c) for c in record["candidates"]]
            masks = list(record["masks"])
            if not candidates:
                raise MalformedDatasetError(
                    f"instance {instance_id!r} has no candidates", line=lineno
                )
            if len(masks) != len(candidates):
                raise MalformedDatasetError(
                    f"instance {instance_id!r} has {len(candidates)} candidates "
                    f"but {len(masks)} masks",
                    line=lineno,
                )
            entries[instance_id] = {
                "candidates": candidates,
                "masks": masks,
                "line": lineno,
            }
        return cls(entries)

    def instance_ids(self) -> list[str]:
        return list(self._entries)

    def candidates(self, instance_id: str) -> list[str]:
        entry = self._entries.get(instance_id)
        if entry is None:
            raise NotFoundError(f"no fixture entry for instance {instance_id!r}")
        return list(entry["candidates"])

    def mask_entry(self, instance_id: str, answer_index: int) -> dict:
        entry = self._entries.get(instance_id)
        if entry is None:
            raise NotFoundError(f"no fixture entry for instance {instance_id!r}")
        masks = entry["masks"]
        if not 0 <= answer_index < len(masks):
            raise NotFoundError(
                f"instance {instance_id!r} has {len(masks)} candidates, "
                f"index {answer_index} is out of range"
            )
        return masks[answer_index]


class FixtureProposalProvider:
    """Serves stored candidate answers, truncated to k at this boundary."""

    def __init__(self, bundle: FixtureBundle, k: int):
        self._bundle = bundle
        self._k = k

    @property
    def name(self) -> str:
        return "fixture-proposals"

    def propose(self, instance: GroundingInstance) -> list[str]:
        return self._bundle.candidates(instance.instance_id)[: self._k]


class FixtureGroundingProvider:
    """Decodes stored polygon/RLE masks at the instance's image dimensions."""

    def __init__(self, bundle: FixtureBundle):
        self._bundle = bundle

    @property
    def name(self) -> str:
        return "fixture-masks"

    def ground(self, instance: GroundingInstance, answer_index: int, query: str) -> BitMask:
        entry = self._bundle.mask_entry(instance.instance_id, answer_index)
        return decode_mask_entry(entry, instance.image_height, instance.image_width)


class EmbeddingTable:
    """Normalized answer -> embedding vector, loaded from a jsonl table.

    All vectors in one table share a dimension; zero vectors are rejected
    at load. Read-only afterwards.
    """

    def __init__(self, vectors: dict[str, Embedding], dimension: int | None):
        self._vectors = vectors
        self._dimension = dimension

    @classmethod
    def load(cls, path) -> "EmbeddingTable":
        vectors: dict[str, Embedding] = {}
        dimension: int | None = None
        for lineno, record in _iter_jsonl(path):
            for key in ("text", "vector"):
                if key not in record:
                    raise MalformedDatasetError(f"missing required field {key!r}", line=lineno)
            text = str(record["text"])
            try:
                emb = Embedding(record["vector"])
            except DegenerateEmbeddingError as exc:
                raise MalformedDatasetError(
                    f"unusable vector for {text!r}: {exc}", line=lineno
                ) from exc
            if dimension is None:
                dimension = emb.dimension
            elif emb.dimension != dimension:
                raise MalformedDatasetError(
                    f"vector for {text!r} has dimension {emb.dimension}, "
                    f"table dimension is {dimension}",
                    line=lineno,
                )
            if text in vectors:
                raise DuplicateIdError(f"line {lineno}: duplicate table entry {text!r}")
            vectors[text] = emb
        return cls(vectors, dimension)

    @property
    def dimension(self) -> int | None:
        return self._dimension

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, text: str) -> bool:
        return text in self._vectors

    def lookup(self, text: str) -> Embedding:
        emb = self._vectors.get(text)
        if emb is None:
            raise NotFoundError(f"no embedding table entry for {text!r}")
        return emb


class TableEmbeddingProvider:
    """Embeds by table lookup; optionally falls back to toy vectors.

    Strict mode raises NotFoundError for missing answers. Lenient mode
    substitutes a deterministic toy embedding at the table's dimension so
    desk-scale runs never require model weights.
    """

    def __init__(self, table: EmbeddingTable, lenient: bool = False):
        self._table = table
        self._lenient = lenient

    @property
    def name(self) -> str:
        return "embedding-table" + ("-lenient" if self._lenient else "")

    def embed(self, normalized: str) -> Embedding:
        try:
            return self._table.lookup(normalized)
        except NotFoundError:
            if not self._lenient:
                raise
            dim = self._table.dimension or DEFAULT_TOY_DIMENSION
            return toy_embed(normalized, dim)


# --------------------------------------------------------------------------
# Remote inference protocol (UTF-8 JSON over HTTP)
#   POST /propose {question, k}          -> {answers: [text, ...]}
#   POST /ground  {query, height, width} -> {rle: {counts, height, width}}
#   POST /embed   {text}                 -> {vector: [number, ...]}
# --------------------------------------------------------------------------


class RemoteClient:
    """Thin JSON client for a live inference service.

    Every failure (transport, status, malformed body) surfaces as
    ProviderError; there are no silent defaults.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, session=None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def _post(self, route: str, payload: dict, instance_id: str | None = None) -> dict:
        url = f"{self.endpoint}{route}"
        try:
            resp = self._session.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderError(
                f"transport failure: {exc}", instance_id=instance_id, endpoint=url
            ) from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"HTTP {resp.status_code}", instance_id=instance_id, endpoint=url
            )
        try:
            body = resp.json()
        except ValueError as exc:
            raise ProviderError(
                "response body is not JSON", instance_id=instance_id, endpoint=url
            ) from exc
        if not isinstance(body, dict):
            raise ProviderError(
                "response body is not a JSON object", instance_id=instance_id, endpoint=url
            )
        return body

    def propose(self, question: str, k: int, instance_id: str | None = None) -> list[str]:
        body = self._post("/propose", {"question": question, "k": k}, instance_id)
        answers = body.get("answers")
        if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
            raise ProviderError(
                "'answers' must be a list of strings",
                instance_id=instance_id,
                endpoint=self.endpoint,
            )
        return answers[:k]

    def ground(self, query: str, height: int, width: int, instance_id: str | None = None) -> BitMask:
        body = self._post(
            "/ground", {"query": query, "height": height, "width": width}, instance_id
        )
        rle = body.get("rle")
        if not isinstance(rle, dict):
            raise ProviderError(
                "'rle' must be an object", instance_id=instance_id, endpoint=self.endpoint
            )
        try:
            mask = decode_rle(RleMask(rle["height"], rle["width"], rle["counts"]))
        except Exception as exc:
            raise ProviderError(
                f"undecodable RLE response: {exc}",
                instance_id=instance_id,
                endpoint=self.endpoint,
            ) from exc
        if mask.shape != (height, width):
            raise ProviderError(
                f"service returned {mask.height}x{mask.width} mask for a "
                f"{height}x{width} request",
                instance_id=instance_id,
                endpoint=self.endpoint,
            )
        return mask

    def embed(self, text: str, instance_id: str | None = None) -> Embedding:
        body = self._post("/embed", {"text": text}, instance_id)
        vector = body.get("vector")
        if not isinstance(vector, list) or not vector:
            raise ProviderError(
                "'vector' must be a non-empty list",
                instance_id=instance_id,
                endpoint=self.endpoint,
            )
        try:
            return Embedding(vector)
        except Exception as exc:
            raise ProviderError(
                f"unusable embedding response: {exc}",
                instance_id=instance_id,
                endpoint=self.endpoint,
            ) from exc


class RemoteProposalProvider:
    def __init__(self, client: RemoteClient, k: int):
        self._client = client
        self._k = k

    @property
    def name(self) -> str:
        return f"remote-proposals:{self._client.endpoint}"

    def propose(self, instance: GroundingInstance) -> list[str]:
        return self._client.propose(instance.question, self._k, instance.instance_id)


class RemoteGroundingProvider:
    def __init__(self, client: RemoteClient):
        self._client = client

    @property
    def name(self) -> str:
        return f"remote-masks:{self._client.endpoint}"

    def ground(self, instance: GroundingInstance, answer_index: int, query: str) -> BitMask:
        return self._client.ground(
            query, instance.image_height, instance.image_width, instance.instance_id
        )


class RemoteEmbeddingProvider:
    def __init__(self, client: RemoteClient):
        self._client = client

    @property
    def name(self) -> str:
        return f"remote-embeddings:{self._client.endpoint}"

    def embed(self, normalized: str) -> Embedding:
        return self._client.embed(normalized)


# --------------------------------------------------------------------------
# Deterministic toy providers for tests and synthetic experiments.
# --------------------------------------------------------------------------


class ToyProposalProvider:
    """Serves candidates from an in-memory mapping of instance_id -> texts."""

    def __init__(self, answers: dict[str, list[str]], k: int):
        self._answers = answers
        self._k = k

    @property
    def name(self) -> str:
        return "toy-proposals"

    def propose(self, instance: GroundingInstance) -> list[str]:
        if instance.instance_id not in self._answers:
            raise NotFoundError(f"no toy answers for instance {instance.instance_id!r}")
        return self._answers[instance.instance_id][: self._k]


class ToyGroundingProvider:
    """Serves masks from a mapping of instance_id -> list of BitMask."""

    def __init__(self, masks: dict[str, list[BitMask]]):
        self._masks = masks

    @property
    def name(self) -> str:
        return "toy-masks"

    def ground(self, instance: GroundingInstance, answer_index: int, query: str) -> BitMask:
        masks = self._masks.get(instance.instance_id)
        if masks is None or not 0 <= answer_index < len(masks):
            raise NotFoundError(
                f"no toy mask for instance {instance.instance_id!r} index {answer_index}"
            )
        return masks[answer_index]


class ToyEmbeddingProvider:
    """Hash-derived embeddings at a fixed dimension; no semantics."""

    def __init__(self, dimension: int = DEFAULT_TOY_DIMENSION):
        self._dimension = dimension

    @property
    def name(self) -> str:
        return f"toy-embeddings(d={self._dimension})"

    def embed(self, normalized: str) -> Embedding:
        return toy_embed(normalized, self._dimension)
