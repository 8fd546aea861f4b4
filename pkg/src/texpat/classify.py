"""Signature matching, k-NN classification, and the benchmark loop.

The heterogeneous distance between two images is the minimum, over all
bijections between their pattern sets, of summed pattern-to-pattern
Euclidean distances; every bijection is enumerated (pattern counts are
small).  The classical baseline is the Euclidean distance between the
whole-image descriptors.  The benchmark runs both methods over one shared
stratified 10-fold plan so the comparison isolates the method.
"""

import hashlib
import itertools
import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .config import RunConfig, config_echo
from .corpus import CorpusEntry, Manifest, load_entry
from .errors import ValidationError
from .features import describe
from .patterns import (ImageSignature, NormalizationStats, build_signature,
                       fit_normalization, signature_key)
from .windows import WindowedImage, decompose, pool_video

log = logging.getLogger(__name__)

FOLD_COUNT = 10
MAX_PATTERNS = 8
METHODS = ('classical', 'heterogeneous')


def pattern_distance(a, b) -> float:
    """Euclidean distance between two pattern mean vectors (scaled space)."""
    va = np.asarray(a.mean_vector, dtype=np.float64)
    vb = np.asarray(b.mean_vector, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValidationError('pattern dimensions differ: %s vs %s' % (va.shape, vb.shape))
    return float(np.sqrt(((va - vb) ** 2).sum()))


@dataclass(frozen=True)
class MatchResult:
    permutation: tuple  # pattern i of the first image pairs with permutation[i]
    total_cost: float


def match_signatures(a: ImageSignature, b: ImageSignature) -> MatchResult:
    """Cheapest bijection between two pattern sets, by full enumeration.

    Ties keep the lexicographically smallest permutation.  Enumeration is
    capped at 8 patterns (40320 bijections).
    """
    if a.k != b.k:
        raise ValidationError('pattern counts differ: %d vs %d' % (a.k, b.k))
    if a.k > MAX_PATTERNS:
        raise ValidationError('exhaustive matching is capped at %d patterns, got %d'
                              % (MAX_PATTERNS, a.k))
    k = a.k
    cost = np.empty((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            cost[i, j] = pattern_distance(a.patterns[i], b.patterns[j])
    rows = np.arange(k)
    best_perm, best_cost = None, np.inf
    for perm in itertools.permutations(range(k)):
        total = float(cost[rows, perm].sum())
        if total < best_cost:
            best_perm, best_cost = perm, total
    return MatchResult(permutation=best_perm, total_cost=best_cost)


def image_distance(a: ImageSignature, b: ImageSignature,
                   method: str = 'heterogeneous') -> float:
    """Distance between two images under the chosen method.

    Signatures must have been built with identical parameters and
    normalization statistics (their params_key fields must match).
    """
    if method not in METHODS:
        raise ValidationError('unknown method %r (expected %s)' % (method, '/'.join(METHODS)))
    if a.params_key != b.params_key:
        raise ValidationError('parameter mismatch between signatures %r and %r'
                              % (a.entry_id, b.entry_id))
    if method == 'classical':
        va, vb = a.classical, b.classical
        if va.shape != vb.shape:
            raise ValidationError('descriptor dimensions differ: %s vs %s' % (va.shape, vb.shape))
        return float(np.sqrt(((va - vb) ** 2).sum()))
    return match_signatures(a, b).total_cost


@dataclass(frozen=True)
class FoldPlan:
    assignment: dict  # entry_id -> fold index in [0, FOLD_COUNT)
    seed: int


def plan_folds(manifest: Manifest, seed: int) -> FoldPlan:
    """Stratified fold plan: per-class shuffle, then round-robin placement.

    The starting fold rotates with the cumulative entry count so small
    classes spread over different folds instead of piling onto fold 0.
    """
    rng = np.random.default_rng(seed)
    by_class = {}
    for e in manifest.entries:
        by_class.setdefault(e.class_label, []).append(e.id)
    assignment = {}
    offset = 0
    for label in sorted(by_class):
        ids = by_class[label]
        if len(ids) < 2:
            raise ValidationError('class %r has a single entry; cross-validation needs >= 2'
                                  % (label,))
        order = rng.permutation(len(ids))
        for slot, idx in enumerate(order):
            assignment[ids[int(idx)]] = (offset + slot) % FOLD_COUNT
        offset = (offset + len(ids)) % FOLD_COUNT
    return FoldPlan(assignment=assignment, seed=seed)


def knn_classify(test: ImageSignature, train, knn_k: int = 1,
                 method: str = 'heterogeneous') -> str:
    """Majority vote over the knn_k nearest training signatures.

    train: list of (ImageSignature, class_label) in manifest order; distance
    ties keep the earlier entry, vote ties resolve to the first tied class
    along the distance ranking (the nearest neighbour's class when it is
    part of the tie).
    """
    if not train:
        raise ValidationError('cannot classify against an empty training set')
    if knn_k < 1:
        raise ValidationError('knn_k must be >= 1, got %r' % (knn_k,))
    dists = np.array([image_distance(test, sig, method) for sig, _ in train])
    order = np.argsort(dists, kind='stable')
    top = order[:min(knn_k, len(train))]
    votes = Counter(train[int(i)][1] for i in top)
    most = max(votes.values())
    tied = {label for label, count in votes.items() if count == most}
    if len(tied) == 1:
        return next(iter(tied))
    for i in top:
        label = train[int(i)][1]
        if label in tied:
            return label
    raise AssertionError('unreachable: some voted class must appear in the ranking')


@dataclass(frozen=True)
class ExtractedEntry:
    """Fold-independent raw extraction of one corpus entry."""
    entry: CorpusEntry
    windows: WindowedImage
    classical_raw: np.ndarray  # unscaled whole-image descriptor (frame average)


def extract_entry(entry: CorpusEntry, config: RunConfig, backend=None) -> ExtractedEntry:
    frames = load_entry(entry, config.gray_levels, config.frame_stride)
    if entry.kind == 'video':
        win = pool_video(frames, config.window_size, entry.id,
                         config.distances, config.symmetric, backend)
    else:
        win = decompose(frames[0], config.window_size, entry.id,
                        config.distances, config.symmetric, backend)
    whole = np.mean([describe(f, config.distances, config.symmetric) for f in frames], axis=0)
    return ExtractedEntry(entry=entry, windows=win, classical_raw=whole)


def _extraction_digest(entry: CorpusEntry, config: RunConfig) -> str:
    """Content hash keying the on-disk descriptor cache."""
    h = hashlib.sha256()
    h.update(('kind=%s|w=%d|g=%d|d=%s|y=%d|stride=%d'
              % (entry.kind, config.window_size, config.gray_levels,
                 ','.join(map(str, config.distances)), int(config.symmetric),
                 config.frame_stride if entry.kind == 'video' else 0)).encode())
    if entry.kind == 'video':
        d = Path(entry.source)
        names = sorted(e.name for e in d.iterdir()
                       if e.is_file() and not e.name.startswith('.'))
        for name in names[::config.frame_stride]:
            h.update(name.encode())
            h.update((d / name).read_bytes())
    else:
        h.update(Path(entry.source).read_bytes())
    return h.hexdigest()


def _extract_cached(entry, config, backend, cache_dir) -> ExtractedEntry:
    if cache_dir is None:
        return extract_entry(entry, config, backend)
    cache = Path(cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    slot = cache / ('%s.npz' % _extraction_digest(entry, config))
    if slot.is_file():
        with np.load(slot) as blob:
            win = WindowedImage(entry_id=entry.id,
                                window_size=int(blob['meta'][0]),
                                grid_shape=(int(blob['meta'][1]), int(blob['meta'][2])),
                                frame_count=int(blob['meta'][3]),
                                positions=blob['positions'],
                                descriptors=blob['descriptors'])
            return ExtractedEntry(entry=entry, windows=win,
                                  classical_raw=blob['classical'])
    done = extract_entry(entry, config, backend)
    w = done.windows
    np.savez(slot, meta=np.array([w.window_size, *w.grid_shape, w.frame_count],
                                 dtype=np.int64),
             positions=w.positions, descriptors=w.descriptors,
             classical=done.classical_raw)
    return done


def extract_corpus(manifest: Manifest, config: RunConfig, workers=None,
                   backend=None, cache_dir=None) -> dict:
    """Extract every entry, optionally in parallel; keyed by entry id.

    Results are identical to a serial run no matter the worker count.
    """
    be = backend or kernels.get_backend()
    be.warmup()
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(manifest.entries) <= 1:
        done = [_extract_cached(e, config, be, cache_dir) for e in manifest.entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(lambda e: _extract_cached(e, config, be, cache_dir),
                                 manifest.entries))
    log.info('extracted %d entries (%d windows) with the %s backend',
             len(done), sum(len(x.windows) for x in done), be.name)
    return {x.entry.id: x for x in done}


@dataclass(frozen=True)
class AccuracyReport:
    dataset: str
    method: str
    config: RunConfig
    fold_correct: tuple  # FOLD_COUNT ints
    fold_total: tuple
    per_class: tuple     # (label, correct, total), sorted by label

    @property
    def overall(self) -> float:
        total = sum(self.fold_total)
        return 100.0 * sum(self.fold_correct) / total if total else 0.0

    def fold_accuracies(self):
        return tuple(100.0 * c / t if t else None
                     for c, t in zip(self.fold_correct, self.fold_total))

    def to_text(self) -> str:
        lines = ['dataset: %s' % self.dataset, 'method: %s' % self.method]
        lines.extend(config_echo(self.config))
        for i, (c, t) in enumerate(zip(self.fold_correct, self.fold_total), start=1):
            lines.append('fold %d accuracy: %s'
                         % (i, '%.2f' % (100.0 * c / t) if t else 'n/a'))
        lines.append('overall accuracy: %.2f' % self.overall)
        for label, c, t in self.per_class:
            lines.append('class %s: %d/%d' % (label, c, t))
        return '\n'.join(lines) + '\n'


class _Tally:
    def __init__(self):
        self.fold_correct = [0] * FOLD_COUNT
        self.fold_total = [0] * FOLD_COUNT
        self.class_correct = Counter()
        self.class_total = Counter()

    def record(self, fold, truth, predicted):
        hit = int(predicted == truth)
        self.fold_correct[fold] += hit
        self.fold_total[fold] += 1
        self.class_correct[truth] += hit
        self.class_total[truth] += 1

    def report(self, dataset, method, config) -> AccuracyReport:
        per_class = tuple((label, self.class_correct[label], self.class_total[label])
                          for label in sorted(self.class_total))
        return AccuracyReport(dataset=dataset, method=method, config=config,
                              fold_correct=tuple(self.fold_correct),
                              fold_total=tuple(self.fold_total),
                              per_class=per_class)


def build_fold_signatures(manifest, extracted, config, train_ids):
    """Fit stats on the training windows, then sign every entry with them."""
    train_desc = np.concatenate([extracted[eid].windows.descriptors
                                 for eid in train_ids])
    stats = fit_normalization(train_desc)
    key = signature_key(config, stats)
    signatures = {}
    for e in manifest.entries:
        ex = extracted[e.id]
        sig, _ = build_signature(e.id, ex.windows, ex.classical_raw, config.patterns,
                                 stats, config.seed, config.trim_fraction, key)
        signatures[e.id] = sig
    return signatures, stats


def run_benchmark(manifest: Manifest, config: RunConfig, workers=None,
                  backend=None, cache_dir=None):
    """Classify every entry once under 10-fold cross-validation.

    Returns (classical report, heterogeneous report); both share the same
    fold plan, seed, and per-fold normalization statistics, so the numbers
    differ only by the distance method.
    """
    config = config.validate()
    plan = plan_folds(manifest, config.seed)
    extracted = extract_corpus(manifest, config, workers, backend, cache_dir)
    tallies = {m: _Tally() for m in METHODS}
    for fold in range(FOLD_COUNT):
        test_entries = [e for e in manifest.entries if plan.assignment[e.id] == fold]
        if not test_entries:
            continue
        train_ids = [e.id for e in manifest.entries if plan.assignment[e.id] != fold]
        signatures, _ = build_fold_signatures(manifest, extracted, config, train_ids)
        train_pairs = [(signatures[e.id], e.class_label)
                       for e in manifest.entries if plan.assignment[e.id] != fold]
        for method in METHODS:
            tally = tallies[method]
            for e in test_entries:
                predicted = knn_classify(signatures[e.id], train_pairs,
                                         config.knn_k, method)
                tally.record(fold, e.class_label, predicted)
        log.info('fold %d/%d: %d test entries classified', fold + 1, FOLD_COUNT,
                 len(test_entries))
    return (tallies['classical'].report(manifest.name, 'classical', config),
            tallies['heterogeneous'].report(manifest.name, 'heterogeneous', config))


def signature_for_path(path, config: RunConfig, stats: NormalizationStats,
                       backend=None) -> ImageSignature:
    """Signature of a standalone image file (or frame directory) so it can
    be classified against a prebuilt store."""
    kind = 'video' if Path(path).is_dir() else 'static'
    entry = CorpusEntry(id=str(path), source=str(path), class_label='?', kind=kind)
    ex = extract_entry(entry, config, backend)
    key = signature_key(config, stats)
    sig, _ = build_signature(entry.id, ex.windows, ex.classical_raw, config.patterns,
                             stats, config.seed, config.trim_fraction, key)
    return sig
