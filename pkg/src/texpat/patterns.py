"""Per-image sub-pattern extraction.

Window descriptors are z-scored with statistics fit on a training
population, clustered per image with k-means, trimmed of the fraction of
windows farthest from their cluster average, and summarized as pattern
signatures (the mean descriptor of each cluster's survivors).  The
classical whole-image descriptor rides along in the same signature so the
two methods can be compared on identical footing.
"""

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, config_from_dict, config_to_dict
from .errors import FormatError, ValidationError
from .windows import WindowedImage

MAX_LLOYD_ITERATIONS = 300
DISCARDED = -1


@dataclass(frozen=True)
class NormalizationStats:
    """Per-dimension mean and population std of a window population."""
    mean: np.ndarray
    std: np.ndarray  # 0 marks a constant dimension

    def transform(self, X) -> np.ndarray:
        """z-score; constant dimensions map to 0 instead of dividing by 0."""
        scale = np.where(self.std == 0.0, 1.0, self.std)
        return (np.asarray(X, dtype=np.float64) - self.mean) / scale

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.mean.tobytes())
        h.update(self.std.tobytes())
        return h.hexdigest()[:12]


def fit_normalization(descriptors) -> NormalizationStats:
    X = np.asarray(descriptors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValidationError('need at least 2 windows to fit normalization statistics')
    return NormalizationStats(mean=X.mean(axis=0), std=X.std(axis=0))


def _init_centroids(X, k, rng):
    """k-means++ seeding: D^2-weighted draws after a uniform first pick."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[int(rng.integers(n))]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            pick = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side='right'))
            pick = min(pick, n - 1)
        else:
            pick = int(rng.integers(n))
        centroids[c] = X[pick]
        np.minimum(d2, ((X - centroids[c]) ** 2).sum(axis=1), out=d2)
    return centroids


def _lloyd(X, k, rng):
    """Lloyd iterations to an assignment fixpoint (or the iteration cap).

    Returns (assignments, centroids, per-iteration objective values).  An
    emptied cluster is re-seeded once per iteration at the point farthest
    from its assigned centroid; a fully degenerate window set (all points
    identical) can leave clusters empty, which the signature stage repairs
    by duplication.
    """
    n = X.shape[0]
    centroids = _init_centroids(X, k, rng)
    prev = None
    objectives = []
    for _ in range(MAX_LLOYD_ITERATIONS):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        repaired = set()
        while True:
            counts = np.bincount(assign, minlength=k)
            empty = [c for c in np.flatnonzero(counts == 0) if c not in repaired]
            if not empty:
                break
            c = int(empty[0])
            repaired.add(c)
            nearest = d2[np.arange(n), assign]
            far = int(nearest.argmax())
            centroids[c] = X[far]
            d2[:, c] = ((X - centroids[c]) ** 2).sum(axis=1)
            assign = d2.argmin(axis=1)
        objectives.append(float(d2[np.arange(n), assign].sum()))
        if prev is not None and np.array_equal(assign, prev):
            break
        prev = assign
        sums = np.zeros((k, X.shape[1]), dtype=np.float64)
        np.add.at(sums, assign, X)
        counts = np.bincount(assign, minlength=k)
        filled = counts > 0
        centroids[filled] = sums[filled] / counts[filled, None]
    return assign, centroids, objectives


def cluster_windows(win: WindowedImage, k: int, stats: NormalizationStats, seed: int):
    """k-means over the z-scored descriptors; returns (assignments, centroids)."""
    if k < 1:
        raise ValidationError('pattern count must be >= 1, got %r' % (k,))
    X = stats.transform(win.descriptors)
    if X.shape[0] < k:
        raise ValidationError('%d windows cannot form %d patterns' % (X.shape[0], k))
    assign, centroids, _ = _lloyd(X, k, np.random.default_rng(seed))
    return assign, centroids


def trim_survivors(assignments, scaled, fraction: float):
    """Per cluster, drop the floor(fraction * n) members farthest from the
    cluster's member mean (Euclidean, in scaled space).

    Returns a copy of ``assignments`` with dropped members set to -1.
    Distance ties keep the earlier (row-major) window.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValidationError('trim fraction must be in [0, 1), got %r' % (fraction,))
    assignments = np.asarray(assignments)
    scaled = np.asarray(scaled, dtype=np.float64)
    out = assignments.copy()
    for c in np.unique(assignments):
        if c < 0:
            continue
        members = np.flatnonzero(assignments == c)
        drop = int(math.floor(fraction * members.size))
        if drop == 0:
            continue
        centre = scaled[members].mean(axis=0)
        dist = np.sqrt(((scaled[members] - centre) ** 2).sum(axis=1))
        keep_first = np.lexsort((members, dist))  # by distance, then window order
        out[members[keep_first[members.size - drop:]]] = DISCARDED
    return out


@dataclass(frozen=True)
class PatternSignature:
    mean_vector: np.ndarray  # average scaled descriptor of the survivors
    member_count: int
    cluster_index: int


@dataclass(frozen=True)
class ImageSignature:
    entry_id: str
    patterns: tuple           # k PatternSignature, ordered by cluster index
    classical: np.ndarray     # whole-image descriptor, scaled like the patterns
    k: int
    params_key: str = ''


@dataclass(frozen=True)
class SegmentationMap:
    entry_id: str
    labels: np.ndarray        # (frames, rows, cols) int16; -1 = discarded
    window_size: int


def signature_key(config: RunConfig, stats: NormalizationStats) -> str:
    """Fingerprint of everything a signature's geometry depends on.

    Signatures may only be compared when their keys match; the key folds in
    the normalization statistics so cross-fold mixups are caught too.
    """
    return '|'.join(['w%d' % config.window_size,
                     'g%d' % config.gray_levels,
                     'k%d' % config.patterns,
                     't%r' % config.trim_fraction,
                     's%d' % config.seed,
                     'd%s' % ','.join(map(str, config.distances)),
                     'a%s' % ','.join(map(str, config.angles)),
                     'y%d' % int(config.symmetric),
                     'n%s' % stats.digest()])


def build_signature(entry_id: str, win: WindowedImage, classical_raw,
                    k: int, stats: NormalizationStats, seed: int,
                    fraction: float, params_key: str = ''):
    """Cluster, trim, and summarize one image.

    classical_raw is the unscaled whole-image descriptor (frame average for
    video); it is scaled with the same statistics as the patterns.  Returns
    (ImageSignature, SegmentationMap).  Clusters left empty by degenerate
    data duplicate the largest surviving pattern so the signature always
    carries k entries.
    """
    scaled = stats.transform(win.descriptors)
    assign, _ = cluster_windows(win, k, stats, seed)
    surviving = trim_survivors(assign, scaled, fraction)

    patterns = []
    for c in range(k):
        members = surviving == c
        count = int(members.sum())
        if count:
            patterns.append(PatternSignature(mean_vector=scaled[members].mean(axis=0),
                                             member_count=count, cluster_index=c))
        else:
            patterns.append(None)
    filled = [p for p in patterns if p is not None]
    largest = max(filled, key=lambda p: (p.member_count, -p.cluster_index))
    patterns = [p if p is not None
                else PatternSignature(mean_vector=largest.mean_vector.copy(),
                                      member_count=largest.member_count, cluster_index=c)
                for c, p in enumerate(patterns)]

    gr, gc = win.grid_shape
    labels = np.asarray(surviving, dtype=np.int16).reshape(win.frame_count, gr, gc)
    classical = stats.transform(np.asarray(classical_raw, dtype=np.float64)[None, :])[0]
    signature = ImageSignature(entry_id=entry_id, patterns=tuple(patterns),
                               classical=classical, k=k, params_key=params_key)
    return signature, SegmentationMap(entry_id=entry_id, labels=labels,
                                      window_size=win.window_size)


STORE_FORMAT = 'texpat-signatures'
STORE_VERSION = 1


def save_signatures(path, labeled_signatures, config: RunConfig,
                    stats: NormalizationStats) -> None:
    """Write a signature store: JSON lines, header record first.

    labeled_signatures: iterable of (ImageSignature, class_label).
    """
    header = {'format': STORE_FORMAT, 'version': STORE_VERSION,
              'config': config_to_dict(config),
              'normalization': {'mean': [float(v) for v in stats.mean],
                                'std': [float(v) for v in stats.std]}}
    lines = [json.dumps(header, separators=(',', ':'))]
    for sig, label in labeled_signatures:
        record = {'entry_id': sig.entry_id,
                  'class_label': label,
                  'k': sig.k,
                  'seed': config.seed,
                  'patterns': [{'cluster': p.cluster_index,
                                'count': p.member_count,
                                'mean': [float(v) for v in p.mean_vector]}
                               for p in sig.patterns],
                  'classical': [float(v) for v in sig.classical]}
        lines.append(json.dumps(record, separators=(',', ':')))
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')


def load_signatures(path):
    """Read a signature store; returns (labeled signatures, config, stats)."""
    p = Path(path)
    lines = [ln for ln in p.read_text(encoding='utf-8').splitlines() if ln.strip()]
    if not lines:
        raise FormatError('%s: empty signature store' % p)

    def parse(ln, text):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError('%s:%d: bad store record (%s)' % (p, ln, exc)) from None

    header = parse(1, lines[0])
    if not isinstance(header, dict) or header.get('format') != STORE_FORMAT:
        raise FormatError('%s: not a signature store' % p)
    if header.get('version') != STORE_VERSION:
        raise FormatError('%s: unsupported store version %r' % (p, header.get('version')))
    try:
        config = config_from_dict(header['config'])
        stats = NormalizationStats(
            mean=np.asarray(header['normalization']['mean'], dtype=np.float64),
            std=np.asarray(header['normalization']['std'], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise FormatError('%s: malformed store header (%s)' % (p, exc)) from None
    key = signature_key(config, stats)

    labeled = []
    for ln, text in enumerate(lines[1:], start=2):
        rec = parse(ln, text)
        try:
            patterns = tuple(PatternSignature(
                mean_vector=np.asarray(pat['mean'], dtype=np.float64),
                member_count=int(pat['count']),
                cluster_index=int(pat['cluster'])) for pat in rec['patterns'])
            sig = ImageSignature(entry_id=str(rec['entry_id']), patterns=patterns,
                                 classical=np.asarray(rec['classical'], dtype=np.float64),
                                 k=int(rec['k']), params_key=key)
            labeled.append((sig, str(rec['class_label'])))
        except (KeyError, TypeError) as exc:
            raise FormatError('%s:%d: malformed store record (%s)' % (p, ln, exc)) from None
    return labeled, config, stats
