import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groundcheck.errors import ConsistencyError, InvalidInputError
from groundcheck.evaluation import (
    PredictionRecord,
    evaluate,
    f1,
    precision,
    recall,
    sweep_thresholds,
)
from groundcheck.geometry import BitMask
from groundcheck.providers import (
    GroundingInstance,
    ToyEmbeddingProvider,
    ToyGroundingProvider,
    ToyProposalProvider,
)
from groundcheck.reasoning import ReasoningConfig


def rec(instance_id, predicted, gold, subset="other"):
    return PredictionRecord(instance_id=instance_id, predicted=predicted, gold=gold, subset=subset)


def confusion(n_correct_single, n_pred_single, n_actual_single, n_total):
    """Build records with exactly the requested confusion counts."""
    records = []
    i = 0
    for _ in range(n_correct_single):
        records.append(rec(f"r{i}", "single", "single")); i += 1
    for _ in range(n_pred_single - n_correct_single):
        records.append(rec(f"r{i}", "single", "multiple")); i += 1
    for _ in range(n_actual_single - n_correct_single):
        records.append(rec(f"r{i}", "multiple", "single")); i += 1
    while i < n_total:
        records.append(rec(f"r{i}", "multiple", "multiple")); i += 1
    return records


class TestMetrics:
    def test_precision_six_of_eight(self):
        records = confusion(6, 8, 10, 20)
        assert precision(records) == 75.0

    def test_precision_absent_without_single_predictions(self):
        assert precision([rec("a", "multiple", "single")]) is None

    def test_precision_perfect(self):
        records = [rec(f"r{i}", "single", "single") for i in range(5)]
        assert precision(records) == 100.0

    def test_recall_six_of_ten(self):
        records = confusion(6, 8, 10, 20)
        assert recall(records) == 60.0

    def test_always_single_predictor_gets_full_recall(self):
        records = [rec(f"r{i}", "single", g, s)
                   for i, (g, s) in enumerate([("single", "vqav2"), ("multiple", "vizwiz"),
                                               ("single", "other"), ("multiple", "other")])]
        assert recall(records) == 100.0

    def test_recall_absent_without_actual_singles(self):
        assert recall([rec("a", "single", "multiple")]) is None

    def test_f1_hand_computed(self):
        assert f1(75.0, 60.0) == pytest.approx(66.67, abs=0.01)

    def test_f1_fixed_point(self):
        for x in (10.0, 50.0, 99.9):
            assert f1(x, x) == pytest.approx(x, abs=1e-12)

    def test_f1_consistent_with_reported_benchmark_row(self):
        # recomputed harmonic mean agrees with the reported 82.63 up to rounding
        assert f1(80.94, 84.33) == pytest.approx(82.60, abs=0.05)

    def test_f1_absent_cases(self):
        assert f1(None, 50.0) is None
        assert f1(0.0, 0.0) is None

    @given(st.lists(
        st.tuples(st.sampled_from(["single", "multiple"]),
                  st.sampled_from(["single", "multiple"])),
        max_size=30,
    ))
    @settings(max_examples=150, deadline=None)
    def test_f1_recomputation_matches(self, pairs):
        records = [rec(f"r{i}", p, g) for i, (p, g) in enumerate(pairs)]
        p, r = precision(records), recall(records)
        expected = f1(p, r)
        if expected is not None:
            assert f1(p, r) == pytest.approx(expected, rel=1e-9)


def make_dataset(labels):
    return [
        GroundingInstance(
            instance_id=f"q{i}", image_id="im", question="?",
            image_height=4, image_width=4,
            gold_label=gold, subset=subset,
        )
        for i, (gold, subset) in enumerate(labels)
    ]


class TestEvaluate:
    def test_hand_built_confusion(self):
        labels = [("single", "vqav2")] * 4 + [("multiple", "vizwiz")] * 4
        dataset = make_dataset(labels)
        decisions = {"q0": 1, "q1": 1, "q2": 0, "q3": 0,  # 2 hits, 2 misses
                     "q4": 1, "q5": 0, "q6": 0, "q7": 0}  # 1 false positive
        report = evaluate(dataset, decisions)
        assert report.predicted_single == 3
        assert report.actual_single == 4
        assert report.correct_single == 2
        assert report.precision == pytest.approx(100 * 2 / 3)
        assert report.recall == 50.0
        assert set(report.subsets) == {"vqav2", "vizwiz"}
        assert report.subsets["vqav2"].recall == 50.0
        assert report.subsets["vizwiz"].precision == 0.0

    def test_unlabeled_instances_excluded_and_counted(self):
        dataset = make_dataset([("single", "other")]) + [
            GroundingInstance(instance_id="q9", image_id="im", question="?",
                              image_height=4, image_width=4)
        ]
        report = evaluate(dataset, {"q0": 1, "q9": 1})
        assert report.total == 1
        assert report.excluded == 1

    def test_decision_for_unknown_instance_rejected(self):
        dataset = make_dataset([("single", "other")])
        with pytest.raises(ConsistencyError):
            evaluate(dataset, {"nope": 1})

    def test_empty_decision_set(self):
        report = evaluate(make_dataset([("single", "other")]), {})
        assert report.total == 0
        assert report.precision is None and report.recall is None and report.f1 is None

    def test_permutation_invariant(self):
        dataset = make_dataset([("single", "vqav2"), ("multiple", "vizwiz"),
                                ("single", "other")])
        decisions = {"q0": 1, "q1": 0, "q2": 0}
        a = evaluate(dataset, decisions)
        b = evaluate(dataset, dict(reversed(list(decisions.items()))))
        assert a == b


def column_mask(cols, h=8, w=8):
    bits = np.zeros((h, w), dtype=bool)
    for c in cols:
        bits[:, c] = True
    return BitMask(bits)


@pytest.fixture()
def sweep_setup():
    # q0: identical masks, similar toy answers; q1: disjoint masks; q2: numeric
    dataset = make_dataset([("single", "vqav2"), ("multiple", "vizwiz"),
                            ("multiple", "vqav2")])
    proposals = ToyProposalProvider(
        {"q0": ["cup", "mug"], "q1": ["cat", "dog"], "q2": ["2", "3"]}, k=3
    )
    masks = ToyGroundingProvider({
        "q0": [column_mask([0, 1]), column_mask([0, 1])],
        "q1": [column_mask([0, 1]), column_mask([4, 5])],
        "q2": [column_mask([0, 1]), column_mask([0, 1, 2])],
    })
    embeddings = ToyEmbeddingProvider(dimension=16)
    return dataset, (proposals, masks, embeddings)


class TestSweepThresholds:
    def test_single_cell_matches_evaluate(self, sweep_setup):
        from groundcheck.reasoning import run_pipeline

        dataset, providers = sweep_setup
        config = ReasoningConfig()
        rows, best = sweep_thresholds(dataset, providers, [0.5], [0.7], config)
        assert len(rows) == 1
        decisions = {
            inst.instance_id: run_pipeline(inst, *providers, config).s
            for inst in dataset
        }
        report = evaluate(dataset, decisions)
        row = rows[0]
        assert (row.precision, row.recall, row.f1) == (
            report.precision, report.recall, report.f1
        )
        assert best == row or best is None

    def test_grid_cardinality_and_order(self, sweep_setup):
        dataset, providers = sweep_setup
        rows, _ = sweep_thresholds(
            dataset, providers, [0.3, 0.5, 0.7], [0.5, 0.7, 0.9], ReasoningConfig()
        )
        assert len(rows) == 9
        assert [(r.tau_iou, r.tau_sem) for r in rows] == [
            (ti, ts) for ti in (0.3, 0.5, 0.7) for ts in (0.5, 0.7, 0.9)
        ]

    def test_predicted_single_monotone_in_tau_iou(self, sweep_setup):
        dataset, providers = sweep_setup
        grid = [0.0, 0.25, 0.5, 0.75, 1.0]
        rows, _ = sweep_thresholds(dataset, providers, grid, [0.7], ReasoningConfig())
        counts = [r.predicted_single for r in rows]
        assert counts == sorted(counts, reverse=True)

    def test_numeric_instances_ignore_tau_sem(self):
        # all-numeric answer sets: F1 constant across tau_sem
        dataset = make_dataset([("single", "other"), ("multiple", "other")])
        providers = (
            ToyProposalProvider({"q0": ["2", "two"], "q1": ["3", "5"]}, k=3),
            ToyGroundingProvider({
                "q0": [column_mask([0]), column_mask([0])],
                "q1": [column_mask([0]), column_mask([5])],
            }),
            ToyEmbeddingProvider(dimension=16),
        )
        rows, _ = sweep_thresholds(
            dataset, providers, [0.5], [-0.5, 0.0, 0.5, 0.99], ReasoningConfig()
        )
        assert len({(r.precision, r.recall, r.f1) for r in rows}) == 1

    def test_empty_grid_rejected(self, sweep_setup):
        dataset, providers = sweep_setup
        with pytest.raises(InvalidInputError):
            sweep_thresholds(dataset, providers, [], [0.7], ReasoningConfig())

    def test_out_of_bounds_grid_rejected(self, sweep_setup):
        dataset, providers = sweep_setup
        with pytest.raises(InvalidInputError):
            sweep_thresholds(dataset, providers, [1.5], [0.7], ReasoningConfig())
