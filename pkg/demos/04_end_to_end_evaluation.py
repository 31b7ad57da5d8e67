"""Full pipeline on the bundled demo: judge every instance, then score.

Equivalent to:
    groundcheck judge <dataset> <fixtures> <embeddings> --out traces.jsonl
    groundcheck evaluate <dataset> traces.jsonl
"""

from collections import Counter

from groundcheck import ReasoningConfig, evaluate, run_pipeline
from groundcheck.demo import demo_paths
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
table = EmbeddingTable.load(embeddings_path)

proposal = FixtureProposalProvider(bundle, config.k)
grounding = FixtureGroundingProvider(bundle)
embedding = TableEmbeddingProvider(table)

decisions = {}
branches = Counter()
for inst in dataset:
    d = run_pipeline(inst, proposal, grounding, embedding, config)
    decisions[inst.instance_id] = d.s
    branches[d.branch.value] += 1
    print(f"{inst.instance_id}  s={d.s}  {d.branch.value:22s}  {inst.question}")

print(f"\nbranch usage: {dict(branches)}")

report = evaluate(dataset, decisions)


def fmt(v):
    return "-" if v is None else f"{v:.2f}"


print(f"\n{'':8s} {'F1':>7s} {'Prec':>7s} {'Recall':>7s}")
print(f"{'overall':8s} {fmt(report.f1):>7s} {fmt(report.precision):>7s} {fmt(report.recall):>7s}")
for name, sub in sorted(report.subsets.items()):
    print(f"{name:8s} {fmt(sub.f1):>7s} {fmt(sub.precision):>7s} {fmt(sub.recall):>7s}")
