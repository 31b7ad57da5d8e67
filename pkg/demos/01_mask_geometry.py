"""Masks and overlap: polygons, run-length encodings, and IoU.

Answer groundings arrive as polygons or RLE and become binary masks on
the image grid; intersection-over-union is the visual agreement signal.
"""

import numpy as np

from groundcheck import (
    Polygon,
    RleMask,
    decode_rle,
    encode_rle,
    iou,
    min_pairwise_iou,
    rasterize_polygon,
    visual_agreement,
)


def show(mask, label):
    print(f"{label}  ({mask.count()} pixels set)")
    for row in mask.bits:
        print("  " + "".join("#" if v else "." for v in row))
    print()


# A polygon is rasterized by sampling pixel centers under even-odd fill.
square = Polygon([(1, 1), (6, 1), (6, 5), (1, 5)])
a = rasterize_polygon(square, 8, 8)
show(a, "A: polygon (1,1)-(6,1)-(6,5)-(1,5) on an 8x8 grid")

# The same region shifted two columns to the right.
shifted = Polygon([(3, 1), (8, 1), (8, 5), (3, 5)])
b = rasterize_polygon(shifted, 8, 8)
show(b, "B: the same rectangle shifted right by 2")

print(f"IoU(A, B) = {iou(a, b):.4f}")
print(f"IoU(A, A) = {iou(a, a):.4f}")

# Masks can also travel as column-major run-length encodings.
rle = encode_rle(a)
print(f"\nA as RLE counts (column-major, zeros first): {list(rle.counts)}")
assert decode_rle(rle) == a

c = decode_rle(RleMask(8, 8, [48, 16]))  # columns 6..7 fully set
show(c, "C: decoded from RLE counts [48, 16]")

# Visual agreement asks whether EVERY pair overlaps at least tau_iou.
masks = [a, b, c]
print(f"min pairwise IoU over {{A,B,C}} = {min_pairwise_iou(masks):.4f}")
for tau in (0.1, 0.3, 0.5):
    print(f"  visual_agreement(tau_iou={tau}) = {visual_agreement(masks, tau)}")
