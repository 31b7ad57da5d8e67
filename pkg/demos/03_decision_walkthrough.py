"""The staged consistency decision, one branch at a time.

The verdict s is 1 when all valid answers ground to one region and 0 when
they point at distinct regions. The rule order: filtration first, then
all-numeric answer sets trust the masks, then semantic disagreement forces
"multiple", and everything else defers to the masks.
"""

import numpy as np

from groundcheck import AnswerCandidate, BitMask, Embedding, ReasoningConfig, decide_consistency

config = ReasoningConfig(tau_iou=0.5, tau_sem=0.7)


def column_mask(cols, h=8, w=8):
    bits = np.zeros((h, w), dtype=bool)
    bits[:, cols] = True
    return BitMask(bits)


def explain(title, raws, masks, embeddings):
    candidates = [AnswerCandidate.from_raw(r) for r in raws]
    d = decide_consistency(candidates, masks, embeddings, config)
    print(f"{title}")
    print(f"  answers   : {raws} -> kept {[c.normalized for c in d.kept_candidates]}")
    print(f"  trace     : all_numeric={d.all_numeric} C_V={d.c_v} D_S={d.d_s}")
    print(f"  iou matrix: {[[round(v, 3) for v in row] for row in d.iou_matrix]}")
    print(f"  sim matrix: {[[round(v, 3) for v in row] for row in d.sim_matrix]}")
    print(f"  verdict   : s={d.s} via {d.branch.value}\n")


left = column_mask(slice(0, 3))
left_too = column_mask(slice(0, 3))
right = column_mask(slice(5, 8))

table = Embedding([1.0, 0.0, 0.0])
headphone = Embedding([0.0, 1.0, 0.0])
desk = Embedding([0.8, 0.6, 0.0])

explain(
    "semantic_disagreement: dissimilar answers, even on the same region",
    ["Table", "Headphone"], [left, left_too], [table, headphone],
)
explain(
    "visual_default: similar answers, overlapping regions",
    ["table", "desk"], [left, left_too], [table, desk],
)
explain(
    "visual_default: similar answers, distinct regions",
    ["table", "desk"], [left, right], [table, desk],
)
explain(
    "numeric: digit answers trust the masks, not the words",
    ["2", "two"], [left, left_too], [table, headphone],
)
explain(
    "degenerate_single: junk and duplicates leave at most one answer",
    ["unanswerable", "cat", "Cat!"], [left, left_too, right], [table, table, table],
)
