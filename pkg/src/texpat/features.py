"""Scalar texture descriptors of a co-occurrence matrix.

The four statistics are Contrast, Correlation, Energy and Homogeneity.
``describe`` evaluates all four over every (distance, angle) displacement
and lays the results out distance-major:

    for d in distances: for angle in (0, 45, 90, 135):
        contrast, correlation, energy, homogeneity

With the default two distances that is the 32-value window descriptor the
rest of the pipeline works with.  This module is the readable reference
path; the batch kernels in ``texpat.kernels`` reproduce it bit-for-bit in
spirit and within 1e-9 in practice.
"""

import numpy as np

from .glcm import ANGLES, Glcm, GlcmSpec, compute_glcm, glcm_marginals

FEATURE_NAMES = ('contrast', 'correlation', 'energy', 'homogeneity')
DEFAULT_DISTANCES = (1, 2)


def contrast(m: Glcm) -> float:
    """Sum of (i - j)^2 p(i, j); 0 iff all mass sits on the diagonal."""
    g = m.p.shape[0]
    i = np.arange(g, dtype=np.float64)
    diff = i[:, None] - i[None, :]
    return float((m.p * diff * diff).sum())


def correlation(m: Glcm) -> float:
    """(sum_ij i*j*p(i,j) - mu_x*mu_y) / (sigma_x*sigma_y), clamped to [-1, 1].

    A marginal concentrated on a single level has sigma 0; by convention the
    result is then 0 (no linear dependence is measurable).  The degenerate
    case is detected from the marginal support, which is exact, rather than
    from a float comparison of sigma against zero.
    """
    p = m.p
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    if np.count_nonzero(px) < 2 or np.count_nonzero(py) < 2:
        return 0.0
    mu_x, mu_y, sigma_x, sigma_y = glcm_marginals(m)
    i = np.arange(p.shape[0], dtype=np.float64)
    ij = float(np.einsum('ij,i,j->', p, i, i))
    value = (ij - mu_x * mu_y) / (sigma_x * sigma_y)
    return float(min(1.0, max(-1.0, value)))


def energy(m: Glcm) -> float:
    """Sum of squared entries; 1 iff all mass sits on a single cell."""
    return float((m.p ** 2).sum())


def homogeneity(m: Glcm) -> float:
    """Sum of p(i, j) / (1 + |i - j|); 1 iff all mass sits on the diagonal."""
    g = m.p.shape[0]
    i = np.arange(g, dtype=np.float64)
    w = 1.0 / (1.0 + np.abs(i[:, None] - i[None, :]))
    return float((m.p * w).sum())


def descriptor_length(distances=DEFAULT_DISTANCES) -> int:
    return len(FEATURE_NAMES) * len(ANGLES) * len(distances)


def descriptor_labels(distances=DEFAULT_DISTANCES):
    """Stable names for every descriptor slot, in layout order."""
    return tuple('d%d_a%d_%s' % (d, a, f)
                 for d in distances for a in ANGLES for f in FEATURE_NAMES)


def describe(img, distances=DEFAULT_DISTANCES, symmetric=True) -> np.ndarray:
    """Full descriptor vector of one image region, in the frozen layout.

    Propagates a degenerate-matrix error when the region is too small for
    the largest distance (a 3x3 region suffices for the default 1 and 2).
    """
    out = np.empty(descriptor_length(distances), dtype=np.float64)
    pos = 0
    for d in distances:
        for a in ANGLES:
            spec = GlcmSpec(distance=d, angle=a, levels=img.levels, symmetric=symmetric)
            m = compute_glcm(img, spec)
            out[pos] = contrast(m)
            out[pos + 1] = correlation(m)
            out[pos + 2] = energy(m)
            out[pos + 3] = homogeneity(m)
            pos += 4
    return out
