"""Precision/recall/F1 on the "single" class, subset breakdown, and sweeps.

All three metrics score the "single" class only, matching the benchmark
convention: a predictor that always answers "single" therefore reaches
100 recall, which is exactly the bias the metric suite must make visible.
Degenerate denominators yield None ("absent"), never a silent 0 or 100.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ConsistencyError, InvalidInputError
from .providers import SUBSETS, GroundingInstance
from .reasoning import ReasoningConfig, decide_consistency, gather_instance_inputs

__all__ = [
    "PredictionRecord",
    "EvalReport",
    "SweepRow",
    "precision",
    "recall",
    "f1",
    "evaluate",
    "sweep_thresholds",
]


@dataclass(frozen=True)
class PredictionRecord:
    """One scored instance: predicted vs gold label plus its subset."""

    instance_id: str
    predicted: str
    gold: str
    subset: str = "other"


@dataclass(frozen=True)
class EvalReport:
    """Counts and metrics for one record set; percentages in [0, 100].

    Metrics are None when their denominator is zero. ``subsets`` holds one
    sub-report per subset observed in the records; ``excluded`` counts
    decisions dropped for lack of a gold label.
    """

    total: int
    predicted_single: int
    actual_single: int
    correct_single: int
    precision: float | None
    recall: float | None
    f1: float | None
    subsets: dict[str, "EvalReport"] = field(default_factory=dict)
    excluded: int = 0

    def to_dict(self) -> dict:
        out = {
            "total": self.total,
            "predicted_single": self.predicted_single,
            "actual_single": self.actual_single,
            "correct_single": self.correct_single,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "excluded": self.excluded,
        }
        if self.subsets:
            out["subsets"] = {name: r.to_dict() for name, r in self.subsets.items()}
        return out


def _counts(records: Sequence[PredictionRecord]) -> tuple[int, int, int]:
    predicted = sum(1 for r in records if r.predicted == "single")
    actual = sum(1 for r in records if r.gold == "single")
    correct = sum(1 for r in records if r.predicted == "single" and r.gold == "single")
    return predicted, actual, correct


def precision(records: Sequence[PredictionRecord]) -> float | None:
    """Share of predicted-"single" instances that are truly single, as a
    percentage; None when nothing was predicted single."""
    predicted, _, correct = _counts(records)
    if predicted == 0:
        return None
    return 100.0 * correct / predicted


def recall(records: Sequence[PredictionRecord]) -> float | None:
    """Share of truly-single instances predicted single, as a percentage;
    None when the record set has no single instances."""
    _, actual, correct = _counts(records)
    if actual == 0:
        return None
    return 100.0 * correct / actual


def f1(p: float | None, r: float | None) -> float | None:
    """Harmonic mean of precision and recall; None when undefined."""
    if p is None or r is None:
        return None
    if p + r == 0:
        return None
    return 2.0 * p * r / (p + r)


def _report_for(records: Sequence[PredictionRecord], excluded: int = 0) -> EvalReport:
    predicted, actual, correct = _counts(records)
    p = precision(records)
    r = recall(records)
    return EvalReport(
        total=len(records),
        predicted_single=predicted,
        actual_single=actual,
        correct_single=correct,
        precision=p,
        recall=r,
        f1=f1(p, r),
        excluded=excluded,
    )


def records_from_decisions(
    dataset: Sequence[GroundingInstance],
    decisions: Mapping[str, int],
) -> tuple[list[PredictionRecord], int]:
    """Pair verdicts with gold labels.

    Returns the scored records plus the count of decisions excluded
    because their instance carries no gold label. A decision for an
    unknown instance is an error, not an exclusion.
    """
    by_id = {inst.instance_id: inst for inst in dataset}
    records: list[PredictionRecord] = []
    excluded = 0
    for instance_id, s in decisions.items():
        inst = by_id.get(instance_id)
        if inst is None:
            raise ConsistencyError(f"decision for unknown instance {instance_id!r}")
        if inst.gold_label is None:
            excluded += 1
            continue
        records.append(
            PredictionRecord(
                instance_id=instance_id,
                predicted="single" if s == 1 else "multiple",
                gold=inst.gold_label,
                subset=inst.subset,
            )
        )
    return records, excluded


def evaluate(
    dataset: Sequence[GroundingInstance],
    decisions: Mapping[str, int],
) -> EvalReport:
    """Score verdicts against gold labels, overall and per subset.

    ``decisions`` maps instance_id to the verdict s (1 = single,
    0 = multiple). Subset sub-reports appear only for subsets actually
    present among the scored records.
    """
    records, excluded = records_from_decisions(dataset, decisions)
    report = _report_for(records, excluded=excluded)
    subsets = {}
    for name in SUBSETS:
        subset_records = [r for r in records if r.subset == name]
        if subset_records:
            subsets[name] = _report_for(subset_records)
    return EvalReport(**{**report.__dict__, "subsets": subsets})


@dataclass(frozen=True)
class SweepRow:
    """One grid cell of a threshold sweep."""

    tau_iou: float
    tau_sem: float
    precision: float | None
    recall: float | None
    f1: float | None
    predicted_single: int
    actual_single: int
    correct_single: int


def sweep_thresholds(
    dataset: Sequence[GroundingInstance],
    providers,
    tau_iou_grid: Sequence[float],
    tau_sem_grid: Sequence[float],
    config: ReasoningConfig,
) -> tuple[list[SweepRow], SweepRow | None]:
    """Evaluate every (tau_iou, tau_sem) grid cell; tau_iou-major row order.

    ``providers`` is the (proposal, grounding, embedding) triple. The
    threshold-independent pipeline stage (propose, filter, ground, embed)
    runs once per instance and is reused across cells. Returns the rows
    and the best cell by F1 (first in row order on ties; rows with an
    absent F1 never win).
    """
    if not tau_iou_grid or not tau_sem_grid:
        raise InvalidInputError("threshold grids must be non-empty")
    for t in tau_iou_grid:
        if not 0.0 <= t <= 1.0:
            raise InvalidInputError(f"tau_iou grid value {t} outside [0, 1]")
    for t in tau_sem_grid:
        if not -1.0 <= t <= 1.0:
            raise InvalidInputError(f"tau_sem grid value {t} outside [-1, 1]")

    proposal_provider, grounding_provider, embedding_provider = providers

    # The provider stage does not depend on the thresholds; run it once per
    # instance and re-run only the decision rule for each grid cell.
    cached = [
        (
            inst.instance_id,
            gather_instance_inputs(
                inst, proposal_provider, grounding_provider, embedding_provider, config
            ),
        )
        for inst in dataset
    ]

    rows: list[SweepRow] = []
    best: SweepRow | None = None
    for tau_iou in tau_iou_grid:
        for tau_sem in tau_sem_grid:
            cell_config = dataclasses.replace(config, tau_iou=tau_iou, tau_sem=tau_sem)
            decisions = {
                instance_id: decide_consistency(*inputs, cell_config).s
                for instance_id, inputs in cached
            }
            report = evaluate(dataset, decisions)
            row = SweepRow(
                tau_iou=tau_iou,
                tau_sem=tau_sem,
                precision=report.precision,
                recall=report.recall,
                f1=report.f1,
                predicted_single=report.predicted_single,
                actual_single=report.actual_single,
                correct_single=report.correct_single,
            )
            rows.append(row)
            if row.f1 is not None and (best is None or best.f1 is None or row.f1 > best.f1):
                best = row
    return rows, best
