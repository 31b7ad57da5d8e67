import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from groundcheck.errors import (
    InsufficientMasksError,
    InvalidInputError,
    InvalidPolygonError,
    MalformedRleError,
    ShapeMismatchError,
)
from groundcheck.geometry import (
    BitMask,
    Polygon,
    RleMask,
    decode_rle,
    encode_rle,
    iou,
    iou_counts,
    min_pairwise_iou,
    rasterize_polygon,
    visual_agreement,
)

from .oracles import pixel_count_iou, shapely_rasterize


def mask_from_cells(h, w, cells):
    bits = np.zeros((h, w), dtype=bool)
    for r, c in cells:
        bits[r, c] = True
    return BitMask(bits)


masks_st = st.tuples(st.integers(1, 32), st.integers(1, 32)).flatmap(
    lambda hw: st.tuples(
        arrays(bool, hw, elements=st.booleans()),
        arrays(bool, hw, elements=st.booleans()),
    )
)


class TestBitMask:
    def test_requires_2d(self):
        with pytest.raises(ShapeMismatchError):
            BitMask(np.zeros(4, dtype=bool))

    def test_requires_positive_dims(self):
        with pytest.raises(ShapeMismatchError):
            BitMask(np.zeros((0, 3), dtype=bool))

    def test_bits_are_read_only(self):
        m = BitMask.zeros(2, 2)
        with pytest.raises(ValueError):
            m.bits[0, 0] = True


class TestRasterizePolygon:
    def test_square_sets_expected_pixels(self):
        # square (0,0)-(4,0)-(4,4)-(0,4) on an 8x8 grid: pixels r,c in 0..3
        poly = Polygon([(0, 0), (4, 0), (4, 4), (0, 4)])
        mask = rasterize_polygon(poly, 8, 8)
        expected = np.zeros((8, 8), dtype=bool)
        expected[0:4, 0:4] = True
        assert np.array_equal(mask.bits, expected)
        assert np.array_equal(mask.bits, shapely_rasterize(poly.vertices, 8, 8))

    def test_degenerate_polygon_rejected(self):
        poly = Polygon([(0, 0), (0, 0), (0, 0)])
        with pytest.raises(InvalidPolygonError):
            rasterize_polygon(poly, 8, 8)

    def test_collinear_polygon_rejected(self):
        poly = Polygon([(0, 0), (2, 2), (4, 4)])
        with pytest.raises(InvalidPolygonError):
            rasterize_polygon(poly, 8, 8)

    def test_fewer_than_three_vertices_rejected(self):
        with pytest.raises(InvalidPolygonError):
            Polygon([(0, 0), (1, 1)])

    def test_non_finite_vertex_rejected(self):
        with pytest.raises(InvalidPolygonError):
            Polygon([(0, 0), (1, float("nan")), (2, 0)])

    def test_fully_out_of_bounds_polygon_is_clipped_to_empty(self):
        poly = Polygon([(10, 10), (20, 10), (20, 20), (10, 20)])
        mask = rasterize_polygon(poly, 8, 8)
        assert mask.count() == 0

    @given(
        st.lists(
            st.tuples(st.floats(-4, 20, allow_nan=False), st.floats(-4, 20, allow_nan=False)),
            min_size=3,
            max_size=8,
        ),
        st.integers(0, 7),
    )
    @settings(max_examples=60, deadline=None)
    def test_cyclic_vertex_rotation_invariance(self, verts, shift):
        try:
            base = rasterize_polygon(Polygon(verts), 16, 16)
        except InvalidPolygonError:
            return
        rotated = verts[shift % len(verts):] + verts[: shift % len(verts)]
        assert rasterize_polygon(Polygon(rotated), 16, 16) == base


class TestRle:
    def test_full_run_of_ones(self):
        mask = decode_rle(RleMask(2, 2, [0, 4]))
        assert mask.count() == 4

    def test_all_zero(self):
        mask = decode_rle(RleMask(2, 2, [4]))
        assert mask.count() == 0

    def test_column_major_positions(self):
        # positions 1 and 2 in column-major order: (r1,c0) and (r0,c1)
        mask = decode_rle(RleMask(2, 2, [1, 2, 1]))
        expected = np.array([[False, True], [True, False]])
        assert np.array_equal(mask.bits, expected)

    def test_counts_sum_mismatch_rejected(self):
        with pytest.raises(MalformedRleError):
            RleMask(2, 2, [1, 2])

    def test_negative_count_rejected(self):
        with pytest.raises(MalformedRleError):
            RleMask(2, 2, [-1, 5])

    @given(
        st.tuples(st.integers(1, 16), st.integers(1, 16)).flatmap(
            lambda hw: arrays(bool, hw, elements=st.booleans())
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_encode_decode_round_trip(self, bits):
        mask = BitMask(bits)
        rle = encode_rle(mask)
        assert decode_rle(rle) == mask
        # canonical counts survive a second round-trip unchanged
        assert encode_rle(decode_rle(rle)).counts == rle.counts


class TestIou:
    def test_identical_nonempty(self):
        m = mask_from_cells(4, 4, [(0, 0), (1, 1)])
        assert iou(m, m) == 1.0

    def test_disjoint(self):
        a = mask_from_cells(4, 4, [(0, 0)])
        b = mask_from_cells(4, 4, [(3, 3)])
        assert iou(a, b) == 0.0

    def test_two_by_two_blocks_share_one_column(self):
        # A = rows 0-1 x cols 0-1, B = rows 0-1 x cols 1-2: inter 2, union 6
        a = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (0, 1)])
        b = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (1, 2)])
        assert iou_counts(a, b) == (2, 6)
        assert iou(a, b) == 2 / 6

    def test_both_empty_is_full_agreement(self):
        assert iou(BitMask.zeros(3, 3), BitMask.zeros(3, 3)) == 1.0

    def test_one_empty_is_no_agreement(self):
        a = BitMask.zeros(3, 3)
        b = mask_from_cells(3, 3, [(1, 1)])
        assert iou(a, b) == 0.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            iou(BitMask.zeros(3, 3), BitMask.zeros(3, 4))

    @given(masks_st)
    @settings(max_examples=150, deadline=None)
    def test_matches_pixel_count_oracle(self, pair):
        a, b = BitMask(pair[0]), BitMask(pair[1])
        inter, union = pixel_count_iou(a.bits, b.bits)
        assert iou_counts(a, b) == (inter, union)
        assert iou(a, b) == (1.0 if union == 0 else inter / union)

    @given(masks_st)
    @settings(max_examples=100, deadline=None)
    def test_symmetry_bounds_and_identity(self, pair):
        a, b = BitMask(pair[0]), BitMask(pair[1])
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0
        assert iou(a, a) == 1.0


class TestMinPairwiseIou:
    def test_three_identical(self):
        m = mask_from_cells(4, 4, [(0, 0)])
        assert min_pairwise_iou([m, m, m]) == 1.0

    def test_two_identical_one_disjoint(self):
        a = mask_from_cells(4, 4, [(0, 0)])
        b = mask_from_cells(4, 4, [(3, 3)])
        assert min_pairwise_iou([a, a, b]) == 0.0

    def test_takes_minimum_over_all_pairs(self):
        # pairwise IoUs: (a,b)=1/2, (a,c)=1/3, (b,c)=1/4
        a = mask_from_cells(4, 4, [(0, 0)])
        b = mask_from_cells(4, 4, [(0, 0), (0, 1)])
        c = mask_from_cells(4, 4, [(0, 0), (0, 2), (0, 3)])
        for x, y, expected in [(a, b, (1, 2)), (a, c, (1, 3)), (b, c, (1, 4))]:
            assert pixel_count_iou(x.bits, y.bits) == expected
        assert min_pairwise_iou([a, b, c]) == 1 / 4

    def test_fewer_than_two_masks_rejected(self):
        with pytest.raises(InsufficientMasksError):
            min_pairwise_iou([BitMask.zeros(2, 2)])


class TestVisualAgreement:
    def test_identical_masks_agree(self):
        m = mask_from_cells(4, 4, [(0, 0)])
        assert visual_agreement([m, m], 0.5) == 1

    def test_third_below_half_threshold(self):
        a = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (0, 1)])
        b = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (1, 2)])
        assert visual_agreement([a, b], 0.5) == 0

    def test_threshold_boundary_is_inclusive(self):
        a = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (0, 1)])
        b = mask_from_cells(4, 4, [(r, c) for r in (0, 1) for c in (1, 2)])
        assert visual_agreement([a, b], 1 / 3) == 1

    def test_tau_outside_unit_interval_rejected(self):
        m = BitMask.zeros(2, 2)
        with pytest.raises(InvalidInputError):
            visual_agreement([m, m], 1.5)

    @given(masks_st, st.floats(0, 1), st.floats(0, 1))
    @settings(max_examples=100, deadline=None)
    def test_monotone_non_increasing_in_tau(self, pair, t1, t2):
        masks = [BitMask(pair[0]), BitMask(pair[1])]
        lo, hi = min(t1, t2), max(t1, t2)
        assert visual_agreement(masks, hi) <= visual_agreement(masks, lo)
