"""Regenerate the bundled demo fixture (20 instances, all four branches).

The bundle is hand-designed so every verdict is derivable on paper:

* masks are axis-aligned rectangles whose pairwise IoUs are simple
  fractions (1, 7/9, 3/13, 1/5, 0), either polygon entries or
  hand-checkable column-band RLE counts;
* embeddings are 4-dim vectors built from (1,0,0,0)/(0.8,0.6,0,0)-style
  pairs, so every cosine is 0.0, 0.8, or 1.0;
* at the default thresholds (tau_iou=0.5, tau_sem=0.7) the verdicts give
  predicted-single=8, actual-single=10, correct-single=6, i.e.
  precision 75.0, recall 60.0, F1 66.67 overall.

Output lands in src/groundcheck/data/demo/ and is committed; this script
exists so the numbers stay reproducible and auditable.
"""

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "groundcheck" / "data" / "demo"

# 16x16 rectangles (polygon x from-to, full rows 2..9)
R1 = {"polygon": [[2, 2], [10, 2], [10, 10], [2, 10]], "height": 16, "width": 16}
SHIFT = {"polygon": [[3, 2], [11, 2], [11, 10], [3, 10]], "height": 16, "width": 16}  # IoU vs R1: 56/72
FAR = {"polygon": [[10, 2], [14, 2], [14, 10], [10, 10]], "height": 16, "width": 16}  # IoU vs R1: 0
LOWLAP = {"polygon": [[7, 2], [15, 2], [15, 10], [7, 10]], "height": 16, "width": 16}  # IoU vs R1: 24/104

# 16x16 full-height column bands as RLE (column-major, zeros first)
BAND_2_9 = {"rle": {"counts": [32, 128, 96], "height": 16, "width": 16}}   # cols 2..9
BAND_2_5 = {"rle": {"counts": [32, 64, 160], "height": 16, "width": 16}}   # cols 2..5
BAND_8_11 = {"rle": {"counts": [128, 64, 64], "height": 16, "width": 16}}  # cols 8..11

# 12x12 shapes
A12 = {"polygon": [[1, 2], [6, 2], [6, 9], [1, 9]], "height": 12, "width": 12}      # cols 1..5
DISJ12 = {"polygon": [[7, 2], [12, 2], [12, 9], [7, 9]], "height": 12, "width": 12}  # cols 7..11
LOW_A12 = {"polygon": [[1, 2], [7, 2], [7, 9], [1, 9]], "height": 12, "width": 12}   # cols 1..6
LOW_B12 = {"polygon": [[5, 2], [11, 2], [11, 9], [5, 9]], "height": 12, "width": 12}  # cols 5..10; IoU vs LOW_A12: 14/70
BAND12_1_4 = {"rle": {"counts": [12, 48, 84], "height": 12, "width": 12}}   # cols 1..4
BAND12_6_9 = {"rle": {"counts": [72, 48, 24], "height": 12, "width": 12}}   # cols 6..9

# (id, subset, H, W, question, gold, candidates, masks)
INSTANCES = [
    ("g01", "vqav2", 16, 16, "What is this?", "multiple",
     ["Table", "Headphone"], [R1, FAR]),
    ("g02", "vqav2", 16, 16, "What kind of furniture is in the corner?", "single",
     ["sofa", "couch"], [R1, SHIFT]),
    ("g03", "vqav2", 16, 16, "How many mugs are on the shelf?", "single",
     ["2", "two"], [BAND_2_9, BAND_2_9]),
    ("g04", "vqav2", 16, 16, "How many lights are on?", "multiple",
     ["2", "3"], [BAND_2_5, BAND_8_11]),
    ("g05", "vqav2", 16, 16, "What is behind the curtain?", "single",
     ["unanswerable"], [R1]),
    ("g06", "vqav2", 16, 16, "What animal is on the bed?", "multiple",
     ["cat", "Cat"], [R1, SHIFT]),
    ("g07", "vqav2", 16, 16, "What does this say?", "multiple",
     ["brand name", "slogan"], [R1, FAR]),
    ("g08", "vqav2", 16, 16, "What animal is shown?", "single",
     ["dog", "puppy"], [R1, LOWLAP]),
    ("g09", "vizwiz", 16, 16, "What is in front of me?", "single",
     ["table", "desk"], [R1, SHIFT]),
    ("g10", "vizwiz", 16, 16, "How many cans are left?", "single",
     ["three", "3"], [BAND_2_9, BAND_2_9]),
    ("g11", "vizwiz", 16, 16, "What is on the counter?", "multiple",
     ["water bottle", "soda can"], [R1, FAR]),
    ("g12", "vizwiz", 16, 16, "What is this clothing?", "multiple",
     ["shirt", "Shirt.", "blue shirt"], [R1, R1, SHIFT]),
    ("g13", "vizwiz", 16, 16, "How many steps are ahead?", "single",
     ["5", "five"], [BAND_2_5, BAND_8_11]),
    ("g14", "vizwiz", 16, 16, "What is in this picture?", "single",
     ["unsuitable", "unknown"], [R1, R1]),
    ("g15", "vizwiz", 16, 16, "What device is on the desk?", "multiple",
     ["keyboard", "mouse"], [R1, R1]),
    ("g16", "vizwiz", 16, 16, "What is on this document?", "single",
     ["paper", "papers"], [R1, LOWLAP]),
    ("g17", "other", 12, 12, "What object is on the shelf?", "multiple",
     ["book", "lamp"], [A12, DISJ12]),
    ("g18", "other", 12, 12, "What is on the couch?", "single",
     ["remote", "tv remote"], [LOW_A12, LOW_B12]),
    ("g19", "other", 12, 12, "What is outside the window?", "multiple",
     ["street", "sign"], [A12, DISJ12]),
    ("g20", "other", 12, 12, "How many chairs are there?", "multiple",
     ["10", "ten"], [BAND12_1_4, BAND12_6_9]),
]

# Base vectors: X=(1,0,0,0) etc.; PAIR_X=(0.8,0.6,0,0) has cosine 0.8 with X.
X = [1.0, 0.0, 0.0, 0.0]
Y = [0.0, 1.0, 0.0, 0.0]
Z = [0.0, 0.0, 1.0, 0.0]
W = [0.0, 0.0, 0.0, 1.0]
NEAR_X = [0.8, 0.6, 0.0, 0.0]
NEAR_Y = [0.0, 0.8, 0.6, 0.0]
NEAR_X2 = [0.8, 0.0, 0.6, 0.0]

EMBEDDINGS = {
    "table": X, "headphone": Y, "desk": NEAR_X,
    "sofa": Y, "couch": NEAR_Y,
    "2": Z, "two": Z, "3": W, "three": Z,
    "cat": X,
    "brand name": X, "slogan": Z,
    "dog": X, "puppy": NEAR_X2,
    "water bottle": X, "soda can": Y,
    "shirt": X, "blue shirt": NEAR_X,
    "5": Z, "five": Z,
    "keyboard": X, "mouse": Y,
    "paper": X, "papers": NEAR_X,
    "book": X, "lamp": Y,
    "remote": X, "tv remote": NEAR_X,
    "street": X, "sign": Y,
    "10": Z, "ten": W,
}


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    with open(OUT_DIR / "demo_dataset.jsonl", "w", encoding="utf-8") as f:
        for iid, subset, h, w, question, gold, _, _ in INSTANCES:
            record = {
                "instance_id": iid,
                "image_id": f"img_{iid}",
                "question": question,
                "image_height": h,
                "image_width": w,
                "gold_label": gold,
                "subset": subset,
            }
            f.write(json.dumps(record, sort_keys=True) + "\n")

    with open(OUT_DIR / "demo_fixtures.jsonl", "w", encoding="utf-8") as f:
        for iid, _, _, _, _, _, candidates, masks in INSTANCES:
            record = {"instance_id": iid, "candidates": candidates, "masks": masks}
            f.write(json.dumps(record, sort_keys=True) + "\n")

    with open(OUT_DIR / "demo_embeddings.jsonl", "w", encoding="utf-8") as f:
        for text in sorted(EMBEDDINGS):
            f.write(json.dumps({"text": text, "vector": EMBEDDINGS[text]}, sort_keys=True) + "\n")

    print(f"wrote demo bundle ({len(INSTANCES)} instances) to {OUT_DIR}")


if __name__ == "__main__":
    main()
