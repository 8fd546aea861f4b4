"""Non-overlapping window tiling with per-window descriptors.

Images are cut into size x size tiles left-to-right, top-to-bottom;
partial tiles at the right and bottom edges are discarded.  Video entries
decompose every sampled frame and pool the windows frame-major under one
entry.  Window featurization runs on whichever kernel backend is selected
(see texpat.kernels); results are merged in deterministic row-major order
no matter how the work is scheduled.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyDecompositionError, ValidationError
from .features import DEFAULT_DISTANCES
from .glcm import ANGLES, displacement


def glcm_offsets(distances=DEFAULT_DISTANCES):
    """(dx, dy) displacement list in descriptor layout order."""
    return tuple(displacement(a, d) for d in distances for a in ANGLES)


def check_window_params(size: int, distances) -> None:
    if size < 3:
        raise ValidationError('window size must be >= 3, got %r' % (size,))
    if not distances:
        raise ValidationError('need at least one displacement distance')
    for d in distances:
        if d < 1:
            raise ValidationError('distances must be >= 1, got %r' % (d,))
        if d >= size:
            raise ValidationError('distance %d needs windows larger than %d pixels' % (d, size))


@dataclass(frozen=True)
class WindowedImage:
    entry_id: str
    window_size: int
    grid_shape: tuple          # (rows, cols) of windows per frame
    frame_count: int
    positions: np.ndarray      # (n, 2) int64 (row, col) within the frame
    descriptors: np.ndarray    # (n, dims) float64

    def __len__(self):
        return self.descriptors.shape[0]

    @property
    def windows(self):
        """(row, col, descriptor) triples in frame-major, row-major order."""
        return [(int(r), int(c), self.descriptors[i])
                for i, (r, c) in enumerate(self.positions)]


def _tile(data: np.ndarray, size: int):
    gr, gc = data.shape[0] // size, data.shape[1] // size
    clipped = data[:gr * size, :gc * size]
    tiles = clipped.reshape(gr, size, gc, size).transpose(0, 2, 1, 3).reshape(-1, size, size)
    return np.ascontiguousarray(tiles), (gr, gc)


def _grid_positions(gr: int, gc: int) -> np.ndarray:
    rows = np.repeat(np.arange(gr, dtype=np.int64), gc)
    cols = np.tile(np.arange(gc, dtype=np.int64), gr)
    return np.stack([rows, cols], axis=1)


def decompose(img, size: int = 8, entry_id: str = '',
              distances=DEFAULT_DISTANCES, symmetric: bool = True,
              backend=None) -> WindowedImage:
    """Tile one image and attach a descriptor to every complete window."""
    check_window_params(size, distances)
    if img.height < size or img.width < size:
        raise EmptyDecompositionError('image %dx%d is smaller than one %dx%d window'
                                      % (img.height, img.width, size, size))
    tiles, grid = _tile(img.data, size)
    be = backend or kernels.get_backend()
    desc = be.window_descriptors(tiles, img.levels, glcm_offsets(distances), symmetric)
    return WindowedImage(entry_id=entry_id, window_size=size, grid_shape=grid,
                         frame_count=1, positions=_grid_positions(*grid),
                         descriptors=desc)


def pool_video(frames, size: int = 8, entry_id: str = '',
               distances=DEFAULT_DISTANCES, symmetric: bool = True,
               backend=None) -> WindowedImage:
    """Decompose every frame and concatenate window records frame-major."""
    if not frames:
        raise ValidationError('cannot pool an empty frame list')
    shapes = {(f.height, f.width, f.levels) for f in frames}
    if len(shapes) > 1:
        raise ValidationError('frame dimensions differ across the video: %s'
                              % sorted(shapes))
    be = backend or kernels.get_backend()
    parts = [decompose(f, size, entry_id, distances, symmetric, be) for f in frames]
    return WindowedImage(entry_id=entry_id, window_size=size,
                         grid_shape=parts[0].grid_shape, frame_count=len(parts),
                         positions=np.concatenate([p.positions for p in parts]),
                         descriptors=np.concatenate([p.descriptors for p in parts]))
