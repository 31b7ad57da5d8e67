"""Answer handling: normalization, filtration, numbers, and similarity."""

from groundcheck import (
    AnswerCandidate,
    Embedding,
    cosine_similarity,
    filter_candidates,
    is_numeric_answer,
    max_pairwise_similarity,
    normalize_answer,
    semantic_disagreement,
    toy_embed,
)

print("normalization")
for raw in ["  Table. ", "HEADPHONE", "3!", "twenty-one", "N/A"]:
    print(f"  {raw!r:16} -> {normalize_answer(raw)!r}")

print("\nnumeric detection (digits, decimals, spelled-out cardinals)")
for text in ["two", "3", "3.5", "twenty one", "table", "2 dogs"]:
    print(f"  {text!r:14} -> {is_numeric_answer(text)}")

print("\nfiltration: junk answers, empties, and duplicates are dropped")
raws = ["Table", "table", "unanswerable", "", "Headphone"]
kept = filter_candidates([AnswerCandidate.from_raw(r) for r in raws])
print(f"  {raws} -> {[c.raw for c in kept]}")

print("\ncosine similarity over embeddings")
table = Embedding([1.0, 0.0, 0.0, 0.0])
desk = Embedding([0.8, 0.6, 0.0, 0.0])
headphone = Embedding([0.0, 0.0, 1.0, 0.0])
print(f"  sim(table, desk)      = {cosine_similarity(table, desk):.3f}")
print(f"  sim(table, headphone) = {cosine_similarity(table, headphone):.3f}")

max_sim = max_pairwise_similarity([table, desk, headphone])
print(f"  max pairwise          = {max_sim:.3f}")
for tau in (0.5, 0.7, 0.9):
    print(f"  semantic_disagreement(tau_sem={tau}) = {semantic_disagreement(max_sim, tau)}")

print("\ntoy embeddings: deterministic hash vectors for weight-free runs")
a, b = toy_embed("cat", 16), toy_embed("cat", 16)
print(f"  sim(toy('cat'), toy('cat')) = {cosine_similarity(a, b):.1f}")
print(f"  sim(toy('cat'), toy('dog')) = {cosine_similarity(a, toy_embed('dog', 16)):.3f}")
