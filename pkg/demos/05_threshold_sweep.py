"""Recovering operating points: sweep tau_iou x tau_sem on the demo set.

The overlap threshold is a free hyperparameter; the sweep shows how the
verdict mix and F1 move as both thresholds vary, and picks the best cell.
"""

from groundcheck import ReasoningConfig
from groundcheck.demo import demo_paths
from groundcheck.evaluation import sweep_thresholds
from groundcheck.providers import (
    EmbeddingTable,
    FixtureBundle,
    FixtureGroundingProvider,
    FixtureProposalProvider,
    TableEmbeddingProvider,
    load_dataset,
)

dataset_path, fixtures_path, embeddings_path = demo_paths()
config = ReasoningConfig()

dataset = load_dataset(dataset_path)
bundle = FixtureBundle.load(fixtures_path)
providers = (
    FixtureProposalProvider(bundle, config.k),
    FixtureGroundingProvider(bundle),
    TableEmbeddingProvider(EmbeddingTable.load(embeddings_path)),
)

iou_grid = [0.2, 0.5, 0.8, 0.95]
sem_grid = [0.5, 0.7, 0.9]
rows, best = sweep_thresholds(dataset, providers, iou_grid, sem_grid, config)


def fmt(v):
    return "   -" if v is None else f"{v:5.1f}"

print("tau_iou  tau_sem  prec   rec    f1   pred.single")
for r in rows:
    print(f"{r.tau_iou:7.2f} {r.tau_sem:8.2f} {fmt(r.precision)} {fmt(r.recall)} {fmt(r.f1)} {r.predicted_single:12d}")

print(f"\nbest cell: tau_iou={best.tau_iou} tau_sem={best.tau_sem} F1={best.f1:.2f}")
