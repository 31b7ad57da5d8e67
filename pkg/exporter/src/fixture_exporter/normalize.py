"""Answer normalization, re-implemented to the shared rule.

This must stay character-identical to the consumer pipeline's
normalization (lowercase, ASCII punctuation to spaces, whitespace
collapsed, outer whitespace stripped) because embedding-table keys are
looked up by normalized text. tests/data/normalization_golden.jsonl pins
the rule; both packages test against the same golden pairs.
"""

import string

_PUNCT_TO_SPACE = str.maketrans({ch: " " for ch in string.punctuation})


def normalize_answer(raw: str) -> str:
    return " ".join(raw.lower().translate(_PUNCT_TO_SPACE).split())
