"""Command-line surface: extract, segment, classify, benchmark.

Logs go to standard error; data goes to files or standard output, so the
commands compose in pipelines.  Exit codes: 0 success, 1 validation error,
2 I/O error, 3 internal error.
"""

import argparse
import dataclasses
import logging
import re
import sys
from pathlib import Path

import numpy as np

from .classify import (METHODS, build_fold_signatures, extract_corpus,
                       knn_classify, run_benchmark, signature_for_path)
from .config import RunConfig, build_config, parse_int_tuple, read_config_file
from .corpus import read_manifest, write_pgm
from .errors import ValidationError
from .features import descriptor_length
from .patterns import (build_signature, fit_normalization, load_signatures,
                       save_signatures, signature_key)

log = logging.getLogger('texpat')

_CONFIG_FLAG_FIELDS = ('window_size', 'gray_levels', 'patterns', 'trim_fraction',
                       'knn_k', 'seed', 'frame_stride', 'distances', 'symmetric')
# parameters a signature store pins; only classification-time knobs may be
# overridden when classifying against a loaded store
_STORE_PINNED_FIELDS = ('window_size', 'gray_levels', 'patterns', 'trim_fraction',
                        'seed', 'frame_stride', 'distances', 'symmetric')


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as validation errors."""

    def error(self, message):
        raise ValidationError('%s: %s' % (self.prog, message))


def _add_common_flags(p):
    p.add_argument('--config', metavar='FILE',
                   help='flat key=value config file (flags override it)')
    p.add_argument('--window-size', dest='window_size', type=int, metavar='N',
                   help='square analysis window edge in pixels (default: 8)')
    p.add_argument('--gray-levels', dest='gray_levels', type=int, metavar='G',
                   help='quantized gray-level count (default: 16)')
    p.add_argument('--patterns', type=int, metavar='K',
                   help='sub-patterns per image (default: 2)')
    p.add_argument('--trim', dest='trim_fraction', type=float, metavar='F',
                   help='fraction of windows trimmed per pattern (default: 0.25)')
    p.add_argument('--knn', dest='knn_k', type=int, metavar='K',
                   help='nearest neighbours voting in classification (default: 1)')
    p.add_argument('--seed', type=int, metavar='N',
                   help='seed for clustering and fold shuffling (default: 42)')
    p.add_argument('--frame-stride', dest='frame_stride', type=int, metavar='N',
                   help='sample every N-th video frame (default: 25)')
    p.add_argument('--distances', type=parse_int_tuple, metavar='D,D',
                   help='comma-separated displacement distances (default: 1,2)')
    p.add_argument('--symmetric', action=argparse.BooleanOptionalAction, default=None,
                   help='count displaced pairs in both directions (default: true)')
    p.add_argument('--workers', type=int, metavar='N',
                   help='parallel extraction workers (default: processor count)')
    p.add_argument('--cache-dir', dest='cache_dir', metavar='DIR',
                   help='cache extracted descriptors under this directory')
    p.add_argument('-v', '--verbose', action='store_true',
                   help='log progress to standard error')


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(
        prog='texpat',
        description='Texture classification from window-level sub-patterns: '
                    'co-occurrence descriptors on 8x8 windows, per-image k-means '
                    'patterns, and matching-based image distances. '
                    'The co-occurrence angle set is fixed (angles default: 0,45,90,135).')
    sub = top.add_subparsers(dest='command', required=True,
                             metavar='{extract,segment,classify,benchmark}')

    pe = sub.add_parser('extract', parents=[], help='write the per-window descriptor CSV')
    pe.add_argument('--manifest', required=True, metavar='CSV')
    pe.add_argument('--out', required=True, metavar='FILE',
                    help="output CSV path ('-' for standard output)")
    _add_common_flags(pe)

    ps = sub.add_parser('segment', help='export per-entry pattern label rasters (PGM)')
    ps.add_argument('--manifest', required=True, metavar='CSV')
    ps.add_argument('--out', required=True, metavar='DIR', help='output directory')
    _add_common_flags(ps)

    pc = sub.add_parser('classify', help='classify query images against signatures')
    pc.add_argument('--manifest', metavar='CSV',
                    help='build reference signatures from this manifest')
    pc.add_argument('--store', metavar='FILE',
                    help='load reference signatures from this store instead')
    pc.add_argument('--save-store', dest='save_store', metavar='FILE',
                    help='write the built signatures to this store file')
    pc.add_argument('--query', action='append', default=[], metavar='IMAGE',
                    help='image file or frame directory to classify; repeatable')
    pc.add_argument('--method', choices=METHODS + ('both',),
                    help='distance method (default: heterogeneous)')
    pc.add_argument('--out', metavar='FILE',
                    help='write predictions here (default: standard output)')
    _add_common_flags(pc)

    pb = sub.add_parser('benchmark', help='10-fold cross-validation of both methods')
    pb.add_argument('--manifest', required=True, metavar='CSV')
    pb.add_argument('--out', metavar='FILE',
                    help='report path (default: standard output)')
    pb.add_argument('--method', choices=METHODS + ('both',),
                    help='which report to write (default: both)')
    _add_common_flags(pb)
    return top


def _flag_overrides(args) -> dict:
    return {name: getattr(args, name) for name in _CONFIG_FLAG_FIELDS}


def _merge_config(args) -> RunConfig:
    file_opts = read_config_file(args.config) if args.config else None
    return build_config(file_opts, _flag_overrides(args))


def _write_text(out, text):
    if out is None or out == '-':
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding='utf-8')


def cmd_extract(args, config: RunConfig) -> None:
    manifest = read_manifest(args.manifest)
    extracted = extract_corpus(manifest, config, args.workers, None, args.cache_dir)
    dims = descriptor_length(config.distances)
    lines = ['entry_id,window_row,window_col,' + ','.join('f%d' % i for i in range(dims))]
    for e in manifest.entries:
        win = extracted[e.id].windows
        for (row, col), vec in zip(win.positions, win.descriptors):
            lines.append('%s,%d,%d,%s'
                         % (e.id, row, col, ','.join(repr(float(v)) for v in vec)))
    _write_text(args.out, '\n'.join(lines) + '\n')
    log.info('wrote %d window rows for %d entries', len(lines) - 1, len(manifest.entries))


def _safe_name(entry_id: str) -> str:
    return re.sub(r'[^A-Za-z0-9._-]', '_', entry_id)


def _label_raster(labels2d: np.ndarray, window_size: int) -> np.ndarray:
    pixels = np.where(labels2d < 0, 255, labels2d).astype(np.uint8)
    return pixels.repeat(window_size, axis=0).repeat(window_size, axis=1)


def cmd_segment(args, config: RunConfig) -> None:
    manifest = read_manifest(args.manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    extracted = extract_corpus(manifest, config, args.workers, None, args.cache_dir)
    stats = fit_normalization(np.concatenate(
        [extracted[e.id].windows.descriptors for e in manifest.entries]))
    key = signature_key(config, stats)
    for e in manifest.entries:
        ex = extracted[e.id]
        _, seg = build_signature(e.id, ex.windows, ex.classical_raw, config.patterns,
                                 stats, config.seed, config.trim_fraction, key)
        populated = np.unique(seg.labels[seg.labels >= 0])
        if populated.size < config.patterns:
            log.info('%s: only %d of %d patterns populated (degenerate texture)',
                     e.id, populated.size, config.patterns)
        for f in range(seg.labels.shape[0]):
            raster = _label_raster(seg.labels[f], config.window_size)
            name = ('%s.pgm' % _safe_name(e.id) if seg.labels.shape[0] == 1
                    else '%s_f%03d.pgm' % (_safe_name(e.id), f))
            write_pgm(out_dir / name, raster, 255)
    log.info('wrote rasters for %d entries to %s', len(manifest.entries), out_dir)


def cmd_classify(args, config: RunConfig) -> None:
    if bool(args.manifest) == bool(args.store):
        raise ValidationError('classify needs exactly one of --manifest or --store')
    if not args.query and not args.save_store:
        raise ValidationError('nothing to do: pass --query and/or --save-store')
    method = args.method or 'heterogeneous'
    methods = METHODS if method == 'both' else (method,)

    if args.manifest:
        manifest = read_manifest(args.manifest)
        extracted = extract_corpus(manifest, config, args.workers, None, args.cache_dir)
        signatures, stats = build_fold_signatures(manifest, extracted, config,
                                                  [e.id for e in manifest.entries])
        labeled = [(signatures[e.id], e.class_label) for e in manifest.entries]
        if args.save_store:
            save_signatures(args.save_store, labeled, config, stats)
            log.info('saved %d signatures to %s', len(labeled), args.save_store)
    else:
        if args.save_store:
            raise ValidationError('--save-store requires --manifest')
        for field in _STORE_PINNED_FIELDS:
            if getattr(args, field) is not None:
                raise ValidationError('--%s cannot be overridden when classifying against '
                                      'a store; rebuild the store instead'
                                      % field.replace('_', '-'))
        labeled, config, stats = load_signatures(args.store)
        if args.knn_k is not None:
            config = dataclasses.replace(config, knn_k=args.knn_k).validate()

    out_lines = []
    for query in args.query:
        sig = signature_for_path(query, config, stats)
        for m in methods:
            label = knn_classify(sig, labeled, config.knn_k, m)
            out_lines.append('%s\t%s\t%s' % (query, m, label))
    if args.query:
        _write_text(args.out, '\n'.join(out_lines) + '\n')


def cmd_benchmark(args, config: RunConfig) -> None:
    manifest = read_manifest(args.manifest)
    classical, heterogeneous = run_benchmark(manifest, config, args.workers,
                                             None, args.cache_dir)
    method = args.method or 'both'
    parts = []
    if method in ('classical', 'both'):
        parts.append(classical.to_text())
    if method in ('heterogeneous', 'both'):
        parts.append(heterogeneous.to_text())
    if method == 'both':
        parts.append('accuracy delta (heterogeneous - classical): %+.2f\n'
                     % (heterogeneous.overall - classical.overall))
    _write_text(args.out, '\n'.join(parts))
    log.info('benchmark finished: classical %.2f, heterogeneous %.2f',
             classical.overall, heterogeneous.overall)


_COMMANDS = {'extract': cmd_extract, 'segment': cmd_segment,
             'classify': cmd_classify, 'benchmark': cmd_benchmark}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s',
                            level=logging.INFO if args.verbose else logging.WARNING)
        config = _merge_config(args)
        _COMMANDS[args.command](args, config)
        return 0
    except ValidationError as exc:
        print('error: %s' % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print('error: %s' % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print('internal error: %s: %s' % (type(exc).__name__, exc), file=sys.stderr)
        return 3


def entrypoint():
    sys.exit(main(sys.argv[1:]))


if __name__ == '__main__':
    entrypoint()
