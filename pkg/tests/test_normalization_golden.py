"""Golden pairs shared with the fixture exporter.

The exporter re-implements answer normalization (it writes the embedding
tables this package looks up by normalized text); both packages test
against the same frozen pairs so the two implementations cannot drift.
"""

import json
from pathlib import Path

from groundcheck.semantics import normalize_answer

GOLDEN = Path(__file__).parent / "data" / "normalization_golden.jsonl"


def test_matches_golden_pairs():
    pairs = [json.loads(line) for line in GOLDEN.read_text(encoding="utf-8").splitlines()]
    assert len(pairs) >= 30
    for pair in pairs:
        assert normalize_answer(pair["raw"]) == pair["normalized"], pair["raw"]
