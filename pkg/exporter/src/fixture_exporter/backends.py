"""Model backends for the three export roles.

Each role is a small interface: a proposer turns (image, question) into
candidate answers, a segmenter turns (image, query) into a binary mask,
an embedder turns texts into vectors. The defaults are deterministic
classical methods that run offline; transformer-backed wrappers are
available when the corresponding weights are installed. Which backend
filled each role is recorded in the export manifest.
"""

import hashlib

import numpy as np
from scipy import ndimage

SPELLED = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
]

HUE_NAMES = [
    (15, "red"), (45, "orange"), (75, "yellow"), (165, "green"),
    (195, "cyan"), (255, "blue"), (315, "purple"), (345, "pink"), (360, "red"),
]


def _stable_hash(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def _to_gray(image: np.ndarray) -> np.ndarray:
    if image.ndim == 2:
        return image.astype(np.float64)
    return image[..., :3].astype(np.float64).mean(axis=2)


def _foreground_components(image: np.ndarray):
    """Label above-mean brightness regions; the crude 'objects' of an image."""
    gray = _to_gray(image)
    fg = gray > gray.mean()
    labels, count = ndimage.label(fg)
    return labels, count


def _dominant_color_names(image: np.ndarray, n: int) -> list[str]:
    if image.ndim == 2:
        return ["gray"] * n
    rgb = image[..., :3].astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn
    hue = np.zeros_like(mx)
    mask = delta > 1e-9
    rm = mask & (mx == r)
    gm = mask & (mx == g) & ~rm
    bm = mask & ~rm & ~gm
    hue[rm] = (60 * ((g - b)[rm] / delta[rm])) % 360
    hue[gm] = 60 * ((b - r)[gm] / delta[gm]) + 120
    hue[bm] = 60 * ((r - g)[bm] / delta[bm]) + 240

    saturated = delta > 0.1
    names = []
    if np.any(saturated):
        hist, edges = np.histogram(hue[saturated], bins=18, range=(0, 360))
        for idx in np.argsort(hist)[::-1]:
            if hist[idx] == 0:
                break
            center = (edges[idx] + edges[idx + 1]) / 2
            name = next(n for limit, n in HUE_NAMES if center <= limit)
            if name not in names:
                names.append(name)
    brightness = rgb.mean()
    names.append("white" if brightness > 0.7 else "black" if brightness < 0.3 else "gray")
    while len(names) < n:
        names.append(names[-1])
    return names[:n]


class HeuristicProposer:
    """Question-aware image-statistics answerer.

    Counting questions are answered from the number of bright connected
    regions (digit and spelled forms); everything else from the dominant
    image colors. Crude, but deterministic and honest about being so.
    """

    name = "heuristic-proposer/v1"

    def propose(self, image: np.ndarray, question: str, k: int) -> list[str]:
        q = question.lower()
        if q.startswith("how many") or q.startswith("how much"):
            _, count = _foreground_components(image)
            answers = [str(count)]
            if count < len(SPELLED):
                answers.append(SPELLED[count])
            answers.append(str(count + 1))
            return answers[:k]
        colors = _dominant_color_names(image, k)
        answers = [f"{colors[0]} object"]
        answers.extend(colors)
        # deduplicate while keeping order; the consumer filters anyway
        seen, out = set(), []
        for a in answers:
            if a not in seen:
                seen.add(a)
                out.append(a)
        return out[:k]


class ThresholdSegmenter:
    """Brightness-threshold segmentation with query-seeded region choice.

    The image's above-mean regions are labeled; the query hash picks which
    region grounds this candidate, so different candidates land on
    different regions of the same image deterministically.
    """

    name = "threshold-segmenter/v1"

    def segment(self, image: np.ndarray, query: str) -> np.ndarray:
        labels, count = _foreground_components(image)
        if count == 0:
            return np.zeros(labels.shape, dtype=bool)
        chosen = _stable_hash(query) % count + 1
        return labels == chosen


class HashingTrigramEmbedder:
    """Character-trigram feature hashing into a fixed dimension.

    Texts sharing surface form get correlated vectors (shared trigrams
    hash to the same components), which is enough structure for offline
    similarity checks. A constant bias feature keeps every non-empty text
    away from the zero vector.
    """

    def __init__(self, dimension: int = 64):
        self.dimension = dimension
        self.name = f"hashing-trigram-embedder/v1(d={dimension})"

    def _embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        padded = f" {text} "
        grams = [padded[i : i + 3] for i in range(len(padded) - 2)] + ["<bias>"]
        for gram in grams:
            h = _stable_hash(gram)
            index = h % self.dimension
            sign = 1.0 if (h >> 32) % 2 == 0 else -1.0
            vec[index] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[_stable_hash(text) % self.dimension] = 1.0
            norm = 1.0
        return vec / norm

    def embed(self, texts: list[str]) -> np.ndarray:
        return np.stack([self._embed_one(t) for t in texts])


class MiniLmEmbedder:
    """Sentence-transformer embedder; needs installed weights."""

    def __init__(self, model_name: str = "sentence-transformers/all-MiniLM-L6-v2"):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise RuntimeError(
                "sentence-transformers is not installed; use the 'models' extra"
            ) from exc
        self._model = SentenceTransformer(model_name)
        self.name = f"sentence-transformer/{model_name}"

    def embed(self, texts: list[str]) -> np.ndarray:
        return np.asarray(self._model.encode(list(texts), convert_to_numpy=True))


class VqaTransformerProposer:
    """Transformers VQA pipeline proposer; needs installed weights."""

    def __init__(self, model_name: str = "Salesforce/blip2-opt-2.7b"):
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise RuntimeError(
                "transformers is not installed; use the 'models' extra"
            ) from exc
        self._pipe = pipeline("visual-question-answering", model=model_name)
        self.name = f"transformers-vqa/{model_name}"

    def propose(self, image: np.ndarray, question: str, k: int) -> list[str]:
        from PIL import Image

        results = self._pipe(Image.fromarray(image), question, top_k=k)
        return [r["answer"] for r in results][:k]


PROPOSERS = {"heuristic": HeuristicProposer, "transformers-vqa": VqaTransformerProposer}
SEGMENTERS = {"threshold": ThresholdSegmenter}
EMBEDDERS = {"hashing": HashingTrigramEmbedder, "minilm": MiniLmEmbedder}
