"""Pure-numpy co-occurrence kernels.

Counting is exact integer work built on ``np.bincount``; feature math runs
vectorized over stacks of normalized matrices.  The numba backend mirrors
this module closely and the test suite holds the two within tight
tolerances of each other.
"""

import numpy as np

FEATURES_PER_MATRIX = 4


def pair_counts(img, dx, dy, levels):
    """Directed co-occurrence counts for one displacement.

    img: 2-D integer array of gray levels in [0, levels).
    dx, dy: column/row offset of the displaced pixel (row 0 is the top row).
    Returns a (levels, levels) int64 matrix whose cell (i, j) counts source
    pixels of level i whose displaced neighbour holds level j.  Displacements
    with no in-bounds pair yield an all-zero matrix.
    """
    rows, cols = img.shape
    r0, r1 = max(0, -dy), min(rows, rows - dy)
    c0, c1 = max(0, -dx), min(cols, cols - dx)
    if r1 <= r0 or c1 <= c0:
        return np.zeros((levels, levels), dtype=np.int64)
    src = img[r0:r1, c0:c1].astype(np.int64)
    dst = img[r0 + dy:r1 + dy, c0 + dx:c1 + dx]
    flat = np.bincount((src * levels + dst).ravel(), minlength=levels * levels)
    return flat.reshape(levels, levels).astype(np.int64, copy=False)


def batch_pair_counts(windows, dx, dy, levels):
    """Directed counts for a stack of same-sized windows: (n, G, G) int64."""
    n, rows, cols = windows.shape
    r0, r1 = max(0, -dy), min(rows, rows - dy)
    c0, c1 = max(0, -dx), min(cols, cols - dx)
    if r1 <= r0 or c1 <= c0:
        return np.zeros((n, levels, levels), dtype=np.int64)
    src = windows[:, r0:r1, c0:c1].astype(np.int64)
    dst = windows[:, r0 + dy:r1 + dy, c0 + dx:c1 + dx]
    idx = np.arange(n, dtype=np.int64)[:, None, None]
    codes = (idx * levels + src) * levels + dst
    flat = np.bincount(codes.ravel(), minlength=n * levels * levels)
    return flat.reshape(n, levels, levels).astype(np.int64, copy=False)


def features_from_probs(probs):
    """Contrast, correlation, energy, homogeneity for stacked matrices.

    probs: (..., G, G) normalized co-occurrence matrices (each sums to 1).
    Returns (..., 4) float64 in the fixed feature order.  Correlation of a
    matrix whose row or column marginal is a point mass is 0 by convention.
    """
    levels = probs.shape[-1]
    ar = np.arange(levels, dtype=np.float64)
    diff = ar[:, None] - ar[None, :]

    contrast = np.einsum('...ij,ij->...', probs, diff * diff)
    energy = np.einsum('...ij,...ij->...', probs, probs)
    homog = np.einsum('...ij,ij->...', probs, 1.0 / (1.0 + np.abs(diff)))

    px = probs.sum(axis=-1)
    py = probs.sum(axis=-2)
    mu_x = px @ ar
    mu_y = py @ ar
    dev_x = ar - mu_x[..., None]
    dev_y = ar - mu_y[..., None]
    var_x = np.einsum('...i,...i->...', px, dev_x * dev_x)
    var_y = np.einsum('...i,...i->...', py, dev_y * dev_y)
    sigma = np.sqrt(var_x * var_y)
    cov = np.einsum('...ij,...i,...j->...', probs, dev_x, dev_y)
    # a marginal supported on a single level has sigma exactly 0; detect it
    # from the support so float dust cannot turn the convention value into
    # a spurious +-1
    ok = ((px > 0.0).sum(axis=-1) > 1) & ((py > 0.0).sum(axis=-1) > 1) & (sigma > 0.0)
    corr = np.where(ok, cov / np.where(ok, sigma, 1.0), 0.0)
    corr = np.clip(corr, -1.0, 1.0)

    return np.stack([contrast, corr, energy, homog], axis=-1)


def window_descriptors(windows, levels, offsets, symmetric):
    """Per-window descriptor block: (n, 4 * len(offsets)) float64.

    windows: (n, s, s) integer array of gray levels.
    offsets: sequence of (dx, dy) displacements, one 4-feature block each.
    """
    windows = np.asarray(windows)
    n = windows.shape[0]
    out = np.empty((n, FEATURES_PER_MATRIX * len(offsets)), dtype=np.float64)
    for block, (dx, dy) in enumerate(offsets):
        counts = batch_pair_counts(windows, dx, dy, levels)
        if symmetric:
            counts = counts + counts.transpose(0, 2, 1)
        totals = counts.sum(axis=(1, 2), dtype=np.float64)
        if not totals.all():
            raise ValueError('displacement (%d, %d) yields no pixel pairs '
                             'in a %dx%d window' % (dx, dy, windows.shape[1], windows.shape[2]))
        probs = counts / totals[:, None, None]
        lo = block * FEATURES_PER_MATRIX
        out[:, lo:lo + FEATURES_PER_MATRIX] = features_from_probs(probs)
    return out
