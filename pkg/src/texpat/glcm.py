"""Gray-level co-occurrence matrices for fixed displacements.

A displacement is a (distance, angle) pair mapped onto a (column, row)
pixel offset with row 0 at the top:

    0 deg  -> ( d,  0)
    45 deg -> ( d, -d)
    90 deg -> ( 0, -d)
    135 deg-> (-d, -d)

This convention is frozen so results are bit-reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMatrixError, ValidationError
from .kernels import np_backend

ANGLES = (0, 45, 90, 135)


def displacement(angle: int, distance: int) -> tuple[int, int]:
    """(dx, dy) pixel offset for one displacement; dy > 0 points down."""
    if distance < 1:
        raise ValidationError('distance must be >= 1, got %r' % (distance,))
    if angle == 0:
        return distance, 0
    if angle == 45:
        return distance, -distance
    if angle == 90:
        return 0, -distance
    if angle == 135:
        return -distance, -distance
    raise ValidationError('angle must be one of %s, got %r' % (ANGLES, angle))


@dataclass(frozen=True)
class GlcmSpec:
    distance: int
    angle: int
    levels: int
    symmetric: bool = True

    def __post_init__(self):
        displacement(self.angle, self.distance)
        if not 2 <= self.levels <= 256:
            raise ValidationError('levels must be in [2, 256], got %r' % (self.levels,))


@dataclass(frozen=True)
class Glcm:
    """Normalized co-occurrence matrix plus the raw integer counts."""
    spec: GlcmSpec
    counts: np.ndarray = field(repr=False)  # int64; symmetrized when spec.symmetric
    p: np.ndarray = field(repr=False)       # counts / counts.sum()
    pair_count: int                          # in-bounds source positions


def compute_glcm(img, spec: GlcmSpec) -> Glcm:
    """Count level pairs at the spec's displacement and normalize.

    img: a QuantizedImage (anything with .data 2-D int grid and .levels).
    Raises DegenerateMatrixError when the image holds no in-bounds pair.
    """
    if img.levels != spec.levels:
        raise ValidationError('image has %d levels but the matrix spec says %d'
                              % (img.levels, spec.levels))
    dx, dy = displacement(spec.angle, spec.distance)
    counts = np_backend.pair_counts(img.data, dx, dy, spec.levels)
    pair_count = int(counts.sum())
    if pair_count == 0:
        raise DegenerateMatrixError(
            'no pixel pairs at distance %d angle %d on a %dx%d image'
            % (spec.distance, spec.angle, img.height, img.width))
    if spec.symmetric:
        counts = counts + counts.T
    p = counts / counts.sum()
    return Glcm(spec=spec, counts=counts, p=p, pair_count=pair_count)


def glcm_marginals(m: Glcm):
    """(mu_x, mu_y, sigma_x, sigma_y) of the row and column marginals.

    Row marginal px(i) = sum_j p(i, j); sigma uses the population form
    sqrt(sum (i - mu)^2 px(i)).  A degenerate sigma of 0 is a valid output.
    """
    levels = np.arange(m.p.shape[0], dtype=np.float64)
    px = m.p.sum(axis=1)
    py = m.p.sum(axis=0)
    mu_x = float(px @ levels)
    mu_y = float(py @ levels)
    sigma_x = float(np.sqrt((((levels - mu_x) ** 2) * px).sum()))
    sigma_y = float(np.sqrt((((levels - mu_y) ** 2) * py).sum()))
    return mu_x, mu_y, sigma_x, sigma_y
