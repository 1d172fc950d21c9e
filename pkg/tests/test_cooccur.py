import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scoot.cooccur import (
    CooccurrenceMatrix,
    Offset,
    Region,
    contrast,
    energy,
    glcm,
    glcm_stack,
    homogeneity,
    normalize,
    stack_statistics,
)
from scoot.imageio import QuantizedImage


def naive_glcm(grades, n_levels, region, dx, dy):
    """Double loop over every pixel of the region; independent of the vectorized path."""
    m = [[0] * n_levels for _ in range(n_levels)]
    for y in range(region.y0, region.y1):
        for x in range(region.x0, region.x1):
            nx, ny = x + dx, y + dy
            if region.x0 <= nx < region.x1 and region.y0 <= ny < region.y1:
                m[grades[y][x]][grades[ny][nx]] += 1
    return np.array(m)


def q_of(rows, n):
    return QuantizedImage(np.array(rows), n)


OFFSETS = [(dx, dy) for dx in range(-2, 3) for dy in range(-2, 3) if (dx, dy) != (0, 0)]


class TestGlcm:
    def test_two_row_example(self):
        q = q_of([[0, 0], [1, 1]], 2)
        m = glcm(q, Region.whole(2, 2), Offset(0, 1))
        assert m.cells.tolist() == [[0, 2], [0, 0]]
        assert not m.normalized

    def test_constant_image(self):
        q = q_of(np.full((5, 7), 3), 6)
        for dx, dy in OFFSETS:
            cells = glcm(q, Region.whole(7, 5), Offset(dx, dy)).cells
            assert np.count_nonzero(cells) == 1 and cells[3, 3] > 0

    def test_single_pixel_region(self):
        q = q_of([[1]], 2)
        assert glcm(q, Region.whole(1, 1), Offset(0, 1)).cells.sum() == 0

    def test_region_out_of_bounds(self):
        q = q_of(np.zeros((4, 4), dtype=int), 2)
        with pytest.raises(ValueError, match="out of bounds"):
            glcm(q, Region(0, 0, 5, 4), Offset(1, 0))

    def test_zero_offset_rejected(self):
        with pytest.raises(ValueError):
            Offset(0, 0)

    def test_integer_counts(self, rng):
        q = q_of(rng.integers(0, 6, (9, 9)), 6)
        cells = glcm(q, Region.whole(9, 9), Offset(1, 1)).cells
        assert np.issubdtype(cells.dtype, np.integer)

    def test_matches_oracle_subregions(self, rng):
        for _ in range(40):
            h, w = rng.integers(1, 15, size=2)
            n = int(rng.integers(2, 9))
            grades = rng.integers(0, n, (h, w))
            x0 = int(rng.integers(0, w)); x1 = int(rng.integers(x0 + 1, w + 1))
            y0 = int(rng.integers(0, h)); y1 = int(rng.integers(y0 + 1, h + 1))
            region = Region(x0, y0, x1, y1)
            dx, dy = OFFSETS[rng.integers(len(OFFSETS))]
            got = glcm(QuantizedImage(grades, n), region, Offset(dx, dy)).cells
            assert np.array_equal(got, naive_glcm(grades.tolist(), n, region, dx, dy))

    def test_direction_reversal_is_transpose(self, rng):
        for _ in range(30):
            q = q_of(rng.integers(0, 6, (12, 10)), 6)
            r = Region.whole(10, 12)
            dx, dy = OFFSETS[rng.integers(len(OFFSETS))]
            fwd = glcm(q, r, Offset(dx, dy))
            back = glcm(q, r, Offset(-dx, -dy))
            assert np.array_equal(back.cells, fwd.cells.T)
            for stat in (homogeneity, contrast, energy):
                assert stat(normalize(fwd)) == pytest.approx(stat(normalize(back)), abs=1e-12)

    def test_mass_conservation(self, rng):
        for h, w in [(5, 5), (7, 3), (1, 9), (12, 30)]:
            q = q_of(rng.integers(0, 4, (h, w)), 4)
            assert glcm(q, Region.whole(w, h), Offset(0, 1)).cells.sum() == w * (h - 1)

    def test_stack_matches_per_block(self, rng):
        grades = rng.integers(0, 6, (14, 11))
        labels = np.zeros((14, 11), dtype=np.intp)
        labels[:, 5:] = 1
        labels[7:, :] += 2
        regions = [Region(0, 0, 5, 7), Region(5, 0, 11, 7), Region(0, 7, 5, 14), Region(5, 7, 11, 14)]
        q = QuantizedImage(grades, 6)
        for dx, dy in OFFSETS:
            stack = glcm_stack(q, labels, 4, Offset(dx, dy))
            for b, r in enumerate(regions):
                assert np.array_equal(stack[b], glcm(q, r, Offset(dx, dy)).cells)


class TestNormalize:
    def test_example(self):
        m = normalize(CooccurrenceMatrix(np.array([[0, 2], [0, 0]])))
        assert m.cells.tolist() == [[0.0, 1.0], [0.0, 0.0]]
        assert m.normalized and not m.degenerate

    def test_idempotent(self, rng):
        m = normalize(CooccurrenceMatrix(rng.integers(0, 9, (4, 4))))
        assert normalize(m) is m or np.array_equal(normalize(m).cells, m.cells)

    def test_zero_matrix_is_degenerate(self):
        m = normalize(CooccurrenceMatrix(np.zeros((3, 3), dtype=int)))
        assert m.degenerate and m.normalized
        assert np.all(m.cells == 0)

    def test_sums_to_one(self, rng):
        for _ in range(20):
            m = normalize(CooccurrenceMatrix(rng.integers(0, 50, (6, 6))))
            assert abs(m.cells.sum() - 1.0) < 1e-12


def unit_mass(n, i, j):
    cells = np.zeros((n, n))
    cells[i, j] = 1.0
    return CooccurrenceMatrix(cells, normalized=True)


class TestStatistics:
    def test_diagonal_mass(self):
        p = CooccurrenceMatrix(np.diag([0.25, 0.25, 0.5]), normalized=True)
        assert homogeneity(p) == 1.0
        assert contrast(p) == 0.0

    def test_off_diagonal(self):
        p = unit_mass(6, 0, 1)
        assert homogeneity(p) == 0.5
        assert contrast(p) == 1.0
        assert energy(p) == 1.0

    def test_far_corner_contrast(self):
        assert contrast(unit_mass(6, 0, 5)) == 25.0

    def test_constant_tone(self):
        q = q_of(np.full((6, 6), 2), 6)
        p = normalize(glcm(q, Region.whole(6, 6), Offset(-1, 1)))
        assert contrast(p) == 0.0
        assert energy(p) == 1.0

    def test_two_half_cells(self):
        cells = np.zeros((3, 3))
        cells[0, 0] = cells[1, 2] = 0.5
        assert energy(CooccurrenceMatrix(cells, normalized=True)) == 0.5

    def test_degenerate_zero(self):
        p = normalize(CooccurrenceMatrix(np.zeros((4, 4), dtype=int)))
        assert homogeneity(p) == 0.0 and contrast(p) == 0.0 and energy(p) == 0.0

    @pytest.mark.parametrize("stat", [homogeneity, contrast, energy])
    def test_rejects_raw_counts(self, stat):
        with pytest.raises(ValueError, match="normalized"):
            stat(CooccurrenceMatrix(np.ones((2, 2), dtype=int)))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_ranges(self, n, seed):
        rng = np.random.default_rng(seed)
        counts = rng.integers(0, 5, (n, n)) * (rng.random((n, n)) < 0.5)
        counts[rng.integers(n), rng.integers(n)] += 1
        p = normalize(CooccurrenceMatrix(counts))
        assert 0.0 <= homogeneity(p) <= 1.0 + 1e-12
        assert 0.0 <= energy(p) <= 1.0 + 1e-12
        assert 0.0 <= contrast(p) <= (n - 1) ** 2 + 1e-9

    def test_energy_one_iff_single_cell(self, rng):
        for _ in range(20):
            n = 5
            counts = rng.integers(0, 3, (n, n))
            counts[0, 0] += 1
            e = energy(normalize(CooccurrenceMatrix(counts)))
            assert (e == 1.0) == (np.count_nonzero(counts) == 1)

    def test_stack_statistics_match_scalar(self, rng):
        counts = rng.integers(0, 4, (5, 6, 6)) * (rng.random((5, 6, 6)) < 0.3)
        counts[2] = 0
        values, degenerate = stack_statistics(counts, ("homogeneity", "contrast", "energy"))
        assert degenerate.tolist() == [False, False, True, False, False]
        for b in range(5):
            p = normalize(CooccurrenceMatrix(counts[b]))
            expect = [homogeneity(p), contrast(p), energy(p)]
            assert np.allclose(values[b], expect, rtol=1e-13, atol=1e-15)
