"""Binary masks, polygon rasterization, run-length coding, and pairwise IoU.

This is the visual half of the consistency check: answer groundings arrive
as polygons or run-length encodings, become ``BitMask`` grids, and are
compared by intersection-over-union.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InsufficientMasksError,
    InvalidInputError,
    InvalidPolygonError,
    MalformedRleError,
    ShapeMismatchError,
)

__all__ = [
    "BitMask",
    "Polygon",
    "RleMask",
    "rasterize_polygon",
    "decode_rle",
    "encode_rle",
    "iou",
    "iou_counts",
    "min_pairwise_iou",
    "visual_agreement",
]


class BitMask:
    """Immutable binary mask over an H x W pixel grid.

    ``bits`` is a read-only boolean array of shape (height, width); entry
    (r, c) is True where the mask covers pixel row r, column c.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits) -> None:
        arr = np.ascontiguousarray(bits, dtype=bool)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"mask bits must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeMismatchError(f"mask dimensions must be >= 1, got {arr.shape}")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, height: int, width: int) -> "BitMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def height(self) -> int:
        return self._bits.shape[0]

    @property
    def width(self) -> int:
        return self._bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._bits.shape

    def count(self) -> int:
        """Number of set pixels."""
        return int(np.count_nonzero(self._bits))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self):
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitMask({self.height}x{self.width}, {self.count()} set)"


@dataclass(frozen=True)
class Polygon:
    """Simple polygon in continuous pixel coordinates, vertices as (x, y).

    x runs along columns and y along rows, so the pixel at row r, column c
    has its center at (c + 0.5, r + 0.5).
    """

    vertices: tuple[tuple[float, float], ...]

    def __init__(self, vertices: Iterable[Sequence[float]]) -> None:
        verts = tuple((float(x), float(y)) for x, y in vertices)
        if len(verts) < 3:
            raise InvalidPolygonError(f"polygon needs >= 3 vertices, got {len(verts)}")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidPolygonError(f"non-finite vertex ({x}, {y})")
        object.__setattr__(self, "vertices", verts)

    def signed_area(self) -> float:
        """Shoelace area; positive for counter-clockwise vertex order."""
        verts = self.vertices
        acc = 0.0
        for (x1, y1), (x2, y2) in zip(verts, verts[1:] + verts[:1]):
            acc += x1 * y2 - x2 * y1
        return 0.5 * acc


@dataclass(frozen=True)
class RleMask:
    """Column-major run-length encoding of a binary mask.

    ``counts`` holds alternating run lengths starting with a run of zeros
    (the first count may be 0 when the mask starts with a set pixel).
    Position p in column-major order corresponds to row p % height,
    column p // height.
    """

    height: int
    width: int
    counts: tuple[int, ...]

    def __init__(self, height: int, width: int, counts: Iterable[int]) -> None:
        object.__setattr__(self, "height", int(height))
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))
        if self.height < 1 or self.width < 1:
            raise MalformedRleError(f"dimensions must be >= 1, got {self.height}x{self.width}")
        if any(c < 0 for c in self.counts):
            raise MalformedRleError("run lengths must be non-negative")
        total = sum(self.counts)
        if total != self.height * self.width:
            raise MalformedRleError(
                f"counts sum to {total}, expected {self.height * self.width}"
            )


def rasterize_polygon(poly: Polygon, height: int, width: int) -> BitMask:
    """Render a polygon onto an H x W grid.

    A pixel (r, c) is set iff its center (c + 0.5, r + 0.5) falls inside the
    polygon under the even-odd fill rule; anything outside the grid is
    clipped away by construction. Zero-area polygons are rejected because
    they denote a degenerate grounding rather than an empty one.
    """
    if height < 1 or width < 1:
        raise ShapeMismatchError(f"grid dimensions must be >= 1, got {height}x{width}")
    if poly.signed_area() == 0.0:
        raise InvalidPolygonError("polygon has zero area")

    xs = np.arange(width, dtype=float) + 0.5
    ys = np.arange(height, dtype=float) + 0.5
    cx, cy = np.meshgrid(xs, ys)

    inside = np.zeros((height, width), dtype=bool)
    verts = poly.vertices
    for (x1, y1), (x2, y2) in zip(verts, verts[1:] + verts[:1]):
        if y1 == y2:
            continue  # horizontal edges never cross the upward ray
        crosses = (y1 > cy) != (y2 > cy)
        # x_at may overflow where crosses is False (near-horizontal edges);
        # those cells are masked out, so the overflow is harmless.
        with np.errstate(over="ignore"):
            x_at = (x2 - x1) * (cy - y1) / (y2 - y1) + x1
        inside ^= crosses & (cx < x_at)
    return BitMask(inside)


def decode_rle(rle: RleMask) -> BitMask:
    """Expand column-major alternating runs (zeros first) into a BitMask."""
    values = np.arange(len(rle.counts)) % 2 == 1
    flat = np.repeat(values, rle.counts)
    return BitMask(flat.reshape((rle.height, rle.width), order="F"))


def encode_rle(mask: BitMask) -> RleMask:
    """Inverse of :func:`decode_rle`, emitting canonical counts.

    Canonical means no interior zero-length runs; only the leading zero-run
    count may be 0 (when the first column-major pixel is set).
    """
    flat = mask.bits.flatten(order="F")
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts = [0] + counts
    return RleMask(mask.height, mask.width, counts)


def iou_counts(a: BitMask, b: BitMask) -> tuple[int, int]:
    """Intersection and union pixel counts for two same-shape masks."""
    if a.shape != b.shape:
        raise ShapeMismatchError(f"mask shapes differ: {a.shape} vs {b.shape}")
    inter = int(np.count_nonzero(a.bits & b.bits))
    union = int(np.count_nonzero(a.bits | b.bits))
    return inter, union


def iou(a: BitMask, b: BitMask) -> float:
    """Intersection-over-union of two masks.

    Two empty masks agree perfectly by convention (1.0); one empty mask
    against a non-empty one yields 0.0.
    """
    inter, union = iou_counts(a, b)
    if union == 0:
        return 1.0
    return inter / union


def min_pairwise_iou(masks: Sequence[BitMask]) -> float:
    """Minimum IoU over all unordered pairs of masks."""
    if len(masks) < 2:
        raise InsufficientMasksError(f"need >= 2 masks, got {len(masks)}")
    best = 1.0
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            best = min(best, iou(masks[i], masks[j]))
    return best


def visual_agreement(masks: Sequence[BitMask], tau_iou: float) -> int:
    """Indicator that every pair of masks overlaps at least ``tau_iou``.

    Returns 1 when min pairwise IoU >= tau_iou (inclusive boundary), else 0.
    """
    if not 0.0 <= tau_iou <= 1.0:
        raise InvalidInputError(f"tau_iou must lie in [0, 1], got {tau_iou}")
    return 1 if min_pairwise_iou(masks) >= tau_iou else 0
