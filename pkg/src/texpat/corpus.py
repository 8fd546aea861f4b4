"""Image loading, gray-level quantization, and dataset manifests.

Native support covers PGM (P2 and P5, maxval up to 255); other raster
formats go through Pillow when it is installed.  Sample values are used
as stored: a PGM with maxval below 255 is not rescaled, the quantizer
always maps the 0..255 domain onto the configured level count.
"""

import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyCorpusError, FormatError, ManifestError, ValidationError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
MANIFEST_HEADER = 'id,source,class_label,kind'
ENTRY_KINDS = ('static', 'video')

_WS = frozenset(b' \t\n\r\v\f')


@dataclass(frozen=True)
class QuantizedImage:
    """Row-major grid of gray levels in [0, levels)."""
    data: np.ndarray
    levels: int

    def __post_init__(self):
        if not isinstance(self.data, np.ndarray) or self.data.ndim != 2 or self.data.size == 0:
            raise ValidationError('image grid must be a non-empty 2-D array')
        if not 2 <= self.levels <= 256:
            raise ValidationError('levels must be in [2, 256], got %r' % (self.levels,))
        if int(self.data.max()) >= self.levels:
            raise ValidationError('gray level %d out of range for %d levels'
                                  % (int(self.data.max()), self.levels))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    source: str
    class_label: str
    kind: str  # static | video


@dataclass(frozen=True)
class Manifest:
    entries: tuple
    name: str

    def classes(self):
        return sorted({e.class_label for e in self.entries})


def quantize(values, levels: int) -> np.ndarray:
    """Map 8-bit sample values onto [0, levels) via floor(v * levels / 256)."""
    v = np.asarray(values)
    return ((v.astype(np.uint32) * levels) >> 8).astype(np.uint8)


def _quantize_real(values, levels: int) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) * levels / 256.0).astype(np.uint8)


def _tokens(buf: bytes, start: int, count: int, name: str):
    """Read whitespace-separated ASCII tokens, honoring # comments."""
    toks = []
    i, n = start, len(buf)
    while len(toks) < count and i < n:
        ch = buf[i]
        if ch == 0x23:  # '#'
            while i < n and buf[i] not in (0x0A, 0x0D):
                i += 1
        elif ch in _WS:
            i += 1
        else:
            j = i
            while j < n and buf[j] not in _WS and buf[j] != 0x23:
                j += 1
            toks.append(buf[i:j])
            i = j
    if len(toks) < count:
        raise FormatError('%s: truncated file' % name)
    return toks, i


def parse_pgm(buf: bytes, name: str = '<pgm>'):
    """Parse P2/P5 bytes into (uint8 array HxW, maxval)."""
    magic = buf[:2]
    if magic not in (b'P2', b'P5'):
        raise FormatError('%s: not a PGM image (magic %r)' % (name, bytes(buf[:2])))
    toks, pos = _tokens(buf, 2, 3, name)
    try:
        width, height, maxval = (int(t) for t in toks)
    except ValueError:
        raise FormatError('%s: non-numeric PGM header' % name) from None
    if width <= 0 or height <= 0:
        raise FormatError('%s: bad dimensions %dx%d' % (name, width, height))
    if not 0 < maxval <= 255:
        raise FormatError('%s: unsupported maxval %d (must be 1..255)' % (name, maxval))
    n = width * height
    if magic == b'P5':
        if pos >= len(buf) or buf[pos] not in _WS:
            raise FormatError('%s: missing raster separator' % name)
        raster = buf[pos + 1:pos + 1 + n]
        if len(raster) < n:
            raise FormatError('%s: truncated file' % name)
        arr = np.frombuffer(raster, dtype=np.uint8, count=n).reshape(height, width).copy()
    else:
        vals, _ = _tokens(buf, pos, n, name)
        try:
            arr = np.array([int(t) for t in vals], dtype=np.int64)
        except ValueError:
            raise FormatError('%s: non-numeric sample value' % name) from None
        if arr.min() < 0:
            raise FormatError('%s: negative sample value' % name)
        arr = arr.astype(np.uint8).reshape(height, width)
    if int(arr.max()) > maxval:
        raise FormatError('%s: sample value %d exceeds maxval %d'
                          % (name, int(arr.max()), maxval))
    return arr, maxval


def read_pgm(path):
    """Load a PGM file; returns (uint8 array HxW, maxval)."""
    return parse_pgm(Path(path).read_bytes(), str(path))


def write_pgm(path, data, maxval: int = 255):
    """Write a 2-D uint8 array as binary PGM (P5)."""
    arr = np.ascontiguousarray(data, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValidationError('PGM raster must be 2-D')
    if not 0 < maxval <= 255:
        raise ValidationError('maxval must be in [1, 255], got %r' % (maxval,))
    if int(arr.max()) > maxval:
        raise ValidationError('sample value %d exceeds maxval %d' % (int(arr.max()), maxval))
    header = b'P5\n%d %d\n%d\n' % (arr.shape[1], arr.shape[0], maxval)
    Path(path).write_bytes(header + arr.tobytes())


def _load_via_pillow(buf: bytes, levels: int, name: str) -> np.ndarray:
    try:
        from PIL import Image
    except ImportError:
        raise FormatError('%s: only PGM is supported unless Pillow is installed '
                          '(pip install texpat[png])' % name) from None
    try:
        img = Image.open(io.BytesIO(buf))
        img.load()
    except Exception as exc:
        raise FormatError('%s: unsupported image format (%s)' % (name, exc)) from None
    if img.mode == 'L':
        return quantize(np.asarray(img, dtype=np.uint8), levels)
    rgb = np.asarray(img.convert('RGB'), dtype=np.float64)
    lum = rgb @ np.asarray(LUMA_WEIGHTS)
    return _quantize_real(lum, levels)


def load_grayscale(path, levels: int = 16) -> QuantizedImage:
    """Load a raster file as a quantized grayscale image.

    Color inputs are reduced to luminance (0.299 R + 0.587 G + 0.114 B)
    before quantization.
    """
    if not 2 <= levels <= 256:
        raise ValidationError('levels must be in [2, 256], got %r' % (levels,))
    buf = Path(path).read_bytes()
    if buf[:2] in (b'P2', b'P5'):
        arr, _ = parse_pgm(buf, str(path))
        data = quantize(arr, levels)
    else:
        data = _load_via_pillow(buf, levels, str(path))
    return QuantizedImage(data=data, levels=levels)


def load_video_frames(dir_path, stride: int = 1, levels: int = 16):
    """Load every stride-th frame of a directory, in lexicographic order."""
    if stride < 1:
        raise ValidationError('frame stride must be >= 1, got %r' % (stride,))
    d = Path(dir_path)
    names = sorted(e.name for e in d.iterdir()
                   if e.is_file() and not e.name.startswith('.'))
    if not names:
        raise EmptyCorpusError('%s: no frame images found' % d)
    return [load_grayscale(d / n, levels) for n in names[::stride]]


def load_entry(entry: CorpusEntry, levels: int, frame_stride: int):
    """All frames of one corpus entry (a single frame for static images)."""
    if entry.kind == 'video':
        return load_video_frames(entry.source, frame_stride, levels)
    return [load_grayscale(entry.source, levels)]


def read_manifest(path) -> Manifest:
    """Parse a manifest CSV: header id,source,class_label,kind, no quoting.

    Relative source paths resolve against the manifest's directory.  Rejects
    duplicate ids and classes with fewer than two entries.
    """
    p = Path(path)
    lines = p.read_text(encoding='utf-8').splitlines()
    if not lines or lines[0].strip() != MANIFEST_HEADER:
        raise ManifestError('%s: first line must be the header %r' % (p, MANIFEST_HEADER))
    base = p.parent
    entries = []
    seen = set()
    class_counts = {}
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(',')
        if len(parts) != 4:
            raise ManifestError('%s:%d: expected 4 comma-separated fields, got %d'
                                % (p, ln, len(parts)))
        eid, source, label, kind = (s.strip() for s in parts)
        if not eid or not source or not label:
            raise ManifestError('%s:%d: id, source and class_label must be non-empty' % (p, ln))
        if kind not in ENTRY_KINDS:
            raise ManifestError('%s:%d: kind must be one of %s, got %r'
                                % (p, ln, '/'.join(ENTRY_KINDS), kind))
        if eid in seen:
            raise ManifestError('%s:%d: duplicate entry id %r' % (p, ln, eid))
        seen.add(eid)
        resolved = source if os.path.isabs(source) else str(base / source)
        entries.append(CorpusEntry(id=eid, source=resolved, class_label=label, kind=kind))
        class_counts[label] = class_counts.get(label, 0) + 1
    if not entries:
        raise ManifestError('%s: manifest has no entries' % p)
    singles = sorted(label for label, c in class_counts.items() if c < 2)
    if singles:
        raise ManifestError('%s: classes with a single entry cannot be cross-validated: %s'
                            % (p, ', '.join(singles)))
    return Manifest(entries=tuple(entries), name=p.stem)
