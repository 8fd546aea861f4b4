import numpy as np
import pytest

import glcm_oracle
from texpat.corpus import QuantizedImage
from texpat.errors import DegenerateMatrixError, ValidationError
from texpat.glcm import (ANGLES, GlcmSpec, compute_glcm, displacement,
                         glcm_marginals)


def img(a, levels=16):
    return QuantizedImage(data=np.asarray(a, dtype=np.uint8), levels=levels)


class TestDisplacement:
    def test_offset_table(self):
        assert displacement(0, 1) == (1, 0)
        assert displacement(45, 1) == (1, -1)
        assert displacement(90, 1) == (0, -1)
        assert displacement(135, 1) == (-1, -1)
        assert displacement(0, 2) == (2, 0)
        assert displacement(135, 3) == (-3, -3)

    def test_rejects_odd_angle(self):
        with pytest.raises(ValidationError, match='angle'):
            displacement(30, 1)

    def test_rejects_zero_distance(self):
        with pytest.raises(ValidationError, match='distance'):
            displacement(0, 0)


class TestComputeGlcm:
    def test_horizontal_checker_pairs(self):
        m = compute_glcm(img([[0, 1], [1, 0]], levels=2),
                         GlcmSpec(distance=1, angle=0, levels=2))
        assert m.pair_count == 2
        assert m.counts.tolist() == [[0, 2], [2, 0]]
        assert m.p.tolist() == [[0.0, 0.5], [0.5, 0.0]]

    def test_vertical_bands_at_90(self):
        m = compute_glcm(img([[0, 0], [1, 1]], levels=2),
                         GlcmSpec(distance=1, angle=90, levels=2))
        assert m.pair_count == 2
        assert m.counts.tolist() == [[0, 2], [2, 0]]

    def test_asymmetric_mode_keeps_direction(self):
        # bottom row sees the top row at 90 degrees, never the reverse
        m = compute_glcm(img([[0, 0], [1, 1]], levels=2),
                         GlcmSpec(distance=1, angle=90, levels=2, symmetric=False))
        assert m.counts.tolist() == [[0, 0], [2, 0]]

    def test_probabilities_sum_to_one(self, rng):
        data = rng.integers(0, 8, size=(12, 9), dtype=np.uint8)
        for a in ANGLES:
            m = compute_glcm(img(data, 8), GlcmSpec(distance=2, angle=a, levels=8))
            assert m.p.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.array_equal(m.counts, m.counts.T)

    def test_pair_count_closed_form(self, rng):
        h, w, d = 9, 7, 2
        data = rng.integers(0, 4, size=(h, w), dtype=np.uint8)
        expected = {0: h * (w - d), 90: (h - d) * w,
                    45: (h - d) * (w - d), 135: (h - d) * (w - d)}
        for a in ANGLES:
            m = compute_glcm(img(data, 4), GlcmSpec(distance=d, angle=a, levels=4))
            assert m.pair_count == expected[a]

    def test_degenerate_when_no_pairs_fit(self):
        with pytest.raises(DegenerateMatrixError):
            compute_glcm(img([[0, 1]], levels=2),
                         GlcmSpec(distance=2, angle=0, levels=2))
        with pytest.raises(DegenerateMatrixError):
            compute_glcm(img([[0], [1]], levels=2),
                         GlcmSpec(distance=1, angle=0, levels=2))

    def test_rejects_level_mismatch(self):
        with pytest.raises(ValidationError, match='levels'):
            compute_glcm(img([[0, 1]], levels=2),
                         GlcmSpec(distance=1, angle=0, levels=4))

    def test_transposed_image_swaps_0_and_90(self, rng):
        data = rng.integers(0, 6, size=(10, 13), dtype=np.uint8)
        for d in (1, 2):
            by_angle = {a: compute_glcm(img(data, 6), GlcmSpec(d, a, 6)).counts
                        for a in ANGLES}
            t_by_angle = {a: compute_glcm(img(data.T, 6), GlcmSpec(d, a, 6)).counts
                          for a in ANGLES}
            assert np.array_equal(t_by_angle[0], by_angle[90])
            assert np.array_equal(t_by_angle[90], by_angle[0])
            assert np.array_equal(t_by_angle[45], by_angle[45])
            assert np.array_equal(t_by_angle[135], by_angle[135])

    def test_matches_pair_enumeration(self, rng):
        for _ in range(20):
            h, w = rng.integers(3, 10, size=2)
            levels = int(rng.choice([2, 4, 8]))
            data = rng.integers(0, levels, size=(h, w), dtype=np.uint8)
            for d in (1, 2):
                for a in ANGLES:
                    want, want_pairs = glcm_oracle.counts(data.tolist(), levels, d, a)
                    spec = GlcmSpec(distance=d, angle=a, levels=levels)
                    if want_pairs == 0:
                        with pytest.raises(DegenerateMatrixError):
                            compute_glcm(img(data, levels), spec)
                        continue
                    m = compute_glcm(img(data, levels), spec)
                    assert m.counts.tolist() == want
                    assert m.pair_count == want_pairs


class TestMarginals:
    def test_two_level_checker(self):
        m = compute_glcm(img([[0, 1], [1, 0]], levels=2),
                         GlcmSpec(distance=1, angle=0, levels=2))
        mu_x, mu_y, sigma_x, sigma_y = glcm_marginals(m)
        assert (mu_x, mu_y) == (0.5, 0.5)
        assert sigma_x == pytest.approx(0.5)
        assert sigma_y == pytest.approx(0.5)

    def test_point_mass_has_zero_sigma(self):
        m = compute_glcm(img([[3, 3], [3, 3]], levels=4),
                         GlcmSpec(distance=1, angle=0, levels=4))
        mu_x, mu_y, sigma_x, sigma_y = glcm_marginals(m)
        assert (mu_x, mu_y) == (3.0, 3.0)
        assert (sigma_x, sigma_y) == (0.0, 0.0)

    def test_symmetric_marginals_coincide(self, rng):
        data = rng.integers(0, 8, size=(9, 9), dtype=np.uint8)
        m = compute_glcm(img(data, 8), GlcmSpec(distance=1, angle=45, levels=8))
        mu_x, mu_y, sigma_x, sigma_y = glcm_marginals(m)
        assert mu_x == pytest.approx(mu_y, abs=1e-12)
        assert sigma_x == pytest.approx(sigma_y, abs=1e-12)
