import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def _paint(width, height, rects):
    """Dark background with bright colored rectangles (the 'objects')."""
    arr = np.full((height, width, 3), 35, dtype=np.uint8)
    for (x0, y0, x1, y1), color in rects:
        arr[y0:y1, x0:x1] = color
    return arr


SAMPLE_SPECS = [
    ("s01", 64, 48, [((4, 4, 24, 24), (220, 40, 40)), ((36, 20, 60, 44), (40, 60, 220))],
     "What is in front of me?", "multiple", "vizwiz"),
    ("s02", 48, 48, [((10, 10, 38, 38), (230, 120, 30))],
     "What is this?", "single", "vizwiz"),
    ("s03", 56, 40, [((2, 2, 18, 18), (40, 200, 70)), ((22, 2, 38, 18), (45, 205, 75)),
                     ((42, 2, 54, 18), (42, 198, 68))],
     "How many plants are there?", "multiple", "vqav2"),
    ("s04", 40, 56, [((6, 6, 34, 50), (200, 200, 210))],
     "What color is the wall?", "single", "vqav2"),
    ("s05", 52, 52, [((4, 28, 24, 48), (150, 40, 200)), ((30, 4, 50, 24), (160, 45, 210))],
     "What object is on the table?", "multiple", "other"),
    ("s06", 44, 44, [((8, 8, 36, 36), (250, 220, 40))],
     "How many lamps are on?", "single", "other"),
]


@pytest.fixture(scope="session")
def sample_export_inputs(tmp_path_factory):
    """Six synthetic images plus the matching items.jsonl."""
    base = tmp_path_factory.mktemp("export_inputs")
    items_path = base / "items.jsonl"
    with open(items_path, "w", encoding="utf-8") as f:
        for iid, w, h, rects, question, gold, subset in SAMPLE_SPECS:
            image_path = base / f"{iid}.png"
            Image.fromarray(_paint(w, h, rects)).save(image_path)
            f.write(json.dumps({
                "instance_id": iid,
                "image": image_path.name,
                "question": question,
                "gold_label": gold,
                "subset": subset,
            }) + "\n")
    return items_path
