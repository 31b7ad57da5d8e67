"""Batch export: run the three model roles and write consumer-format files.

Outputs: dataset.jsonl (instances with image dimensions), fixtures.jsonl
(candidates plus one RLE mask per candidate), embeddings.jsonl (one vector
per distinct normalized answer), and manifest.json (model identifiers and
settings). Files are written atomically; every emitted file must pass the
consumer's `validate` command with zero violations.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .backends import HashingTrigramEmbedder, HeuristicProposer, ThresholdSegmenter
from .normalize import normalize_answer


class ExportError(Exception):
    """Raised when a model fails or an output would violate the format."""


@dataclass(frozen=True)
class ExportItem:
    """One image/question pair to export."""

    instance_id: str
    image_path: str
    question: str
    gold_label: str | None = None
    subset: str | None = None


@dataclass
class ExportJob:
    items: list[ExportItem]
    output_dir: Path
    k: int = 3
    proposer: object = field(default_factory=HeuristicProposer)
    segmenter: object = field(default_factory=ThresholdSegmenter)
    embedder: object = field(default_factory=HashingTrigramEmbedder)


def build_grounding_query(question: str, answer: str) -> str:
    """Composite query, byte-identical to the consumer's rule."""
    return f"{question} {answer}"


def encode_rle(mask: np.ndarray) -> dict:
    """Column-major alternating-run encoding, zeros first."""
    flat = np.asarray(mask, dtype=bool).flatten(order="F")
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts = [0] + counts
    height, width = mask.shape
    if sum(counts) != height * width:
        raise ExportError("RLE counts do not cover the grid")  # unreachable guard
    return {"counts": counts, "height": height, "width": width}


def _load_image(item: ExportItem) -> np.ndarray:
    try:
        with Image.open(item.image_path) as img:
            return np.asarray(img.convert("RGB"))
    except OSError as exc:
        raise ExportError(f"instance {item.instance_id!r}: cannot read image: {exc}") from exc


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def export_answers(job: ExportJob) -> tuple[dict[str, list[str]], list[str]]:
    """Top-k answers per instance, raw text preserved.

    Items with an empty question are flagged and skipped rather than
    aborting the batch; the skip list lands in the manifest.
    """
    answers: dict[str, list[str]] = {}
    skipped: list[str] = []
    for item in job.items:
        if not item.question.strip():
            skipped.append(item.instance_id)
            continue
        image = _load_image(item)
        try:
            proposals = job.proposer.propose(image, item.question, job.k)
        except Exception as exc:
            raise ExportError(
                f"instance {item.instance_id!r}: proposer failed: {exc}"
            ) from exc
        if not proposals:
            raise ExportError(f"instance {item.instance_id!r}: proposer returned no answers")
        answers[item.instance_id] = [str(a) for a in proposals[: job.k]]
    return answers, skipped


def export_masks(job: ExportJob, answers: dict[str, list[str]]) -> dict[str, list[dict]]:
    """One RLE mask per candidate, at the instance's image dimensions."""
    masks: dict[str, list[dict]] = {}
    for item in job.items:
        if item.instance_id not in answers:
            continue
        image = _load_image(item)
        entries = []
        for answer in answers[item.instance_id]:
            query = build_grounding_query(item.question, answer)
            try:
                mask = job.segmenter.segment(image, query)
            except Exception as exc:
                raise ExportError(
                    f"instance {item.instance_id!r}: segmenter failed: {exc}"
                ) from exc
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != image.shape[:2]:
                raise ExportError(
                    f"instance {item.instance_id!r}: segmenter returned {mask.shape}, "
                    f"image is {image.shape[:2]}"
                )
            entries.append({"rle": encode_rle(mask)})
        masks[item.instance_id] = entries
    return masks


def export_embeddings(job: ExportJob, answers: dict[str, list[str]]) -> dict[str, list[float]]:
    """One vector per distinct normalized answer; uniform dimension."""
    texts = sorted({
        normalize_answer(a)
        for candidates in answers.values()
        for a in candidates
        if normalize_answer(a)
    })
    if not texts:
        return {}
    try:
        vectors = np.asarray(job.embedder.embed(texts), dtype=np.float64)
    except Exception as exc:
        raise ExportError(f"embedder failed: {exc}") from exc
    if vectors.ndim != 2 or vectors.shape[0] != len(texts):
        raise ExportError(f"embedder returned shape {vectors.shape} for {len(texts)} texts")
    if not np.all(np.isfinite(vectors)):
        raise ExportError("embedder returned non-finite components")
    if np.any(np.linalg.norm(vectors, axis=1) == 0.0):
        raise ExportError("embedder returned a zero vector")
    return {text: vectors[i].tolist() for i, text in enumerate(texts)}


def run_export(job: ExportJob) -> dict:
    """Run all three roles and write the output files; returns the manifest."""
    job.output_dir.mkdir(parents=True, exist_ok=True)

    answers, skipped = export_answers(job)
    masks = export_masks(job, answers)
    table = export_embeddings(job, answers)

    dataset_lines = []
    fixture_lines = []
    for item in job.items:
        if item.instance_id not in answers:
            continue
        with Image.open(item.image_path) as img:
            width, height = img.size
        record = {
            "instance_id": item.instance_id,
            "image_id": Path(item.image_path).stem,
            "question": item.question,
            "image_height": height,
            "image_width": width,
        }
        if item.gold_label is not None:
            record["gold_label"] = item.gold_label
        if item.subset is not None:
            record["subset"] = item.subset
        dataset_lines.append(json.dumps(record, sort_keys=True))
        fixture_lines.append(json.dumps({
            "instance_id": item.instance_id,
            "candidates": answers[item.instance_id],
            "masks": masks[item.instance_id],
        }, sort_keys=True))

    embedding_lines = [
        json.dumps({"text": text, "vector": table[text]}, sort_keys=True)
        for text in sorted(table)
    ]

    manifest = {
        "models": {
            "proposer": job.proposer.name,
            "segmenter": job.segmenter.name,
            "embedder": job.embedder.name,
        },
        "settings": {"k": job.k, "decoding": "deterministic"},
        "instances_exported": len(dataset_lines),
        "instances_skipped": skipped,
    }

    _atomic_write(job.output_dir / "dataset.jsonl", "".join(l + "\n" for l in dataset_lines))
    _atomic_write(job.output_dir / "fixtures.jsonl", "".join(l + "\n" for l in fixture_lines))
    _atomic_write(job.output_dir / "embeddings.jsonl", "".join(l + "\n" for l in embedding_lines))
    _atomic_write(job.output_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_items(path) -> list[ExportItem]:
    """Read the export item list (jsonl: instance_id, image, question, ...)."""
    items = []
    base = Path(path).resolve().parent
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        record = json.loads(line)
        try:
            image = record["image"]
            items.append(ExportItem(
                instance_id=str(record["instance_id"]),
                image_path=str(image if os.path.isabs(image) else base / image),
                question=str(record["question"]),
                gold_label=record.get("gold_label"),
                subset=record.get("subset"),
            ))
        except KeyError as exc:
            raise ExportError(f"line {lineno}: missing field {exc}") from exc
    return items
