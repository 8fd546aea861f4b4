import numpy as np
import pytest

import synth
from texpat.corpus import QuantizedImage
from texpat.errors import EmptyDecompositionError, ValidationError
from texpat.features import describe
from texpat.windows import (check_window_params, decompose, glcm_offsets,
                            pool_video)


def img(a, levels=16):
    return QuantizedImage(data=np.asarray(a, dtype=np.uint8), levels=levels)


class TestOffsets:
    def test_layout_order(self):
        assert glcm_offsets((1, 2)) == ((1, 0), (1, -1), (0, -1), (-1, -1),
                                        (2, 0), (2, -2), (0, -2), (-2, -2))

    def test_param_checks(self):
        check_window_params(8, (1, 2))
        with pytest.raises(ValidationError):
            check_window_params(2, (1,))
        with pytest.raises(ValidationError):
            check_window_params(8, ())
        with pytest.raises(ValidationError):
            check_window_params(8, (0,))
        with pytest.raises(ValidationError):
            check_window_params(8, (1, 8))


class TestDecompose:
    def test_window_counts(self, rng):
        for side, count in ((8, 1), (40, 25), (128, 256)):
            data = rng.integers(0, 16, size=(side, side), dtype=np.uint8)
            assert len(decompose(img(data))) == count

    def test_partial_edges_discarded(self, rng):
        data = rng.integers(0, 16, size=(20, 19), dtype=np.uint8)
        win = decompose(img(data))
        assert win.grid_shape == (2, 2)
        assert len(win) == 4
        assert win.positions.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]

    def test_every_descriptor_matches_its_tile(self, rng):
        # windowed fast path against the per-region reference path
        data = rng.integers(0, 16, size=(24, 16), dtype=np.uint8)
        win = decompose(img(data))
        for row, col, vec in win.windows:
            tile = data[row * 8:(row + 1) * 8, col * 8:(col + 1) * 8]
            np.testing.assert_allclose(vec, describe(img(tile)), atol=1e-9, rtol=0)

    def test_constant_image_gives_identical_rows(self):
        win = decompose(img(np.full((16, 16), 3)))
        assert np.array_equal(win.descriptors[0], win.descriptors[1])
        assert len(np.unique(win.descriptors, axis=0)) == 1

    def test_distinct_halves_give_distinct_rows(self):
        data = synth.hsplit_composite(synth.constant(8, 8, 0),
                                      synth.checkerboard(8, 8))
        win = decompose(synth.to_quantized(data))
        assert not np.array_equal(win.descriptors[0], win.descriptors[1])

    def test_too_small_image(self):
        with pytest.raises(EmptyDecompositionError):
            decompose(img(np.zeros((7, 9), dtype=np.uint8)))

    def test_metadata(self, rng):
        data = rng.integers(0, 16, size=(16, 24), dtype=np.uint8)
        win = decompose(img(data), entry_id='e1')
        assert win.entry_id == 'e1'
        assert win.window_size == 8
        assert win.frame_count == 1
        assert win.descriptors.shape == (6, 32)


class TestPoolVideo:
    def test_frames_pool_in_order(self):
        frames = [synth.to_quantized(grid) for grid in
                  (synth.constant(8, 16), synth.checkerboard(8, 16),
                   synth.stripes(8, 16, period=2))]
        win = pool_video(frames, entry_id='vid')
        assert win.frame_count == 3
        assert len(win) == 6
        assert win.positions.tolist() == [[0, 0], [0, 1]] * 3
        per_frame = [decompose(f).descriptors for f in frames]
        assert np.array_equal(win.descriptors, np.concatenate(per_frame))
        # the frames carry distinct textures, so order actually matters here
        assert not np.array_equal(per_frame[0], per_frame[1])

    def test_single_frame_matches_decompose(self, rng):
        data = rng.integers(0, 16, size=(16, 16), dtype=np.uint8)
        a = pool_video([img(data)])
        b = decompose(img(data))
        assert np.array_equal(a.descriptors, b.descriptors)
        assert a.frame_count == 1

    def test_rejects_empty_list(self):
        with pytest.raises(ValidationError):
            pool_video([])

    def test_rejects_mismatched_frames(self):
        with pytest.raises(ValidationError, match='differ'):
            pool_video([img(np.zeros((8, 8), dtype=np.uint8)),
                        img(np.zeros((8, 16), dtype=np.uint8))])
