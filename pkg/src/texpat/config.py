"""Run configuration shared by every command.

Precedence is command-line flags > config file > defaults.  The config
file is flat ``key=value`` text with ``#`` comments; keys are the
RunConfig field names.
"""

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .glcm import ANGLES

FIXED_ANGLES = ANGLES


@dataclass(frozen=True)
class RunConfig:
    window_size: int = 8
    gray_levels: int = 16
    patterns: int = 2
    trim_fraction: float = 0.25
    knn_k: int = 1
    seed: int = 42
    frame_stride: int = 25
    distances: tuple = (1, 2)
    angles: tuple = FIXED_ANGLES
    symmetric: bool = True

    def validate(self) -> 'RunConfig':
        if self.window_size < 3:
            raise ValidationError('window_size must be >= 3, got %r' % (self.window_size,))
        if not 2 <= self.gray_levels <= 256:
            raise ValidationError('gray_levels must be in [2, 256], got %r' % (self.gray_levels,))
        if not 1 <= self.patterns <= 8:
            raise ValidationError('patterns must be in [1, 8], got %r' % (self.patterns,))
        if not 0.0 <= self.trim_fraction < 1.0:
            raise ValidationError('trim_fraction must be in [0, 1), got %r' % (self.trim_fraction,))
        if self.knn_k < 1:
            raise ValidationError('knn_k must be >= 1, got %r' % (self.knn_k,))
        if self.seed < 0:
            raise ValidationError('seed must be >= 0, got %r' % (self.seed,))
        if self.frame_stride < 1:
            raise ValidationError('frame_stride must be >= 1, got %r' % (self.frame_stride,))
        if not self.distances:
            raise ValidationError('need at least one displacement distance')
        for d in self.distances:
            if d < 1:
                raise ValidationError('distances must be >= 1, got %r' % (d,))
            if d >= self.window_size:
                raise ValidationError('distance %d does not fit a %d-pixel window'
                                      % (d, self.window_size))
        if tuple(self.angles) != FIXED_ANGLES:
            raise ValidationError('the angle set is fixed at %s' % (FIXED_ANGLES,))
        return self


_BOOL_WORDS = {'true': True, 'yes': True, 'on': True, '1': True,
               'false': False, 'no': False, 'off': False, '0': False}


def parse_bool(text: str) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValidationError('expected a boolean, got %r' % (text,)) from None


def parse_int_tuple(text: str) -> tuple:
    try:
        items = tuple(int(t) for t in text.split(',') if t.strip())
    except ValueError:
        raise ValidationError('expected comma-separated integers, got %r' % (text,)) from None
    if not items:
        raise ValidationError('expected comma-separated integers, got %r' % (text,))
    return items


_FIELD_PARSERS = {
    'window_size': int,
    'gray_levels': int,
    'patterns': int,
    'trim_fraction': float,
    'knn_k': int,
    'seed': int,
    'frame_stride': int,
    'distances': parse_int_tuple,
    'angles': parse_int_tuple,
    'symmetric': parse_bool,
}


def read_config_file(path) -> dict:
    """Parse a flat key=value config file into RunConfig field values."""
    opts = {}
    for ln, raw in enumerate(Path(path).read_text(encoding='utf-8').splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValidationError('%s:%d: expected key=value, got %r' % (path, ln, raw))
        if key not in _FIELD_PARSERS:
            raise ValidationError('%s:%d: unknown option %r' % (path, ln, key))
        try:
            opts[key] = _FIELD_PARSERS[key](value)
        except ValidationError:
            raise
        except ValueError:
            raise ValidationError('%s:%d: bad value %r for %s' % (path, ln, value, key)) from None
    return opts


def build_config(file_opts=None, overrides=None) -> RunConfig:
    """Merge defaults, config-file values, and explicit overrides."""
    values = {}
    for source in (file_opts or {}), (overrides or {}):
        for key, val in source.items():
            if val is None:
                continue
            if key not in _FIELD_PARSERS:
                raise ValidationError('unknown config option %r' % (key,))
            values[key] = tuple(val) if key in ('distances', 'angles') else val
    return RunConfig(**values).validate()


def config_to_dict(cfg: RunConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d['distances'] = list(cfg.distances)
    d['angles'] = list(cfg.angles)
    return d


def config_from_dict(d: dict) -> RunConfig:
    return build_config(overrides=dict(d))


def config_echo(cfg: RunConfig):
    """Stable parameter lines embedded in every report."""
    return ['window_size: %d' % cfg.window_size,
            'gray_levels: %d' % cfg.gray_levels,
            'patterns: %d' % cfg.patterns,
            'trim_fraction: %r' % cfg.trim_fraction,
            'knn_k: %d' % cfg.knn_k,
            'seed: %d' % cfg.seed,
            'frame_stride: %d' % cfg.frame_stride,
            'distances: %s' % ','.join(str(d) for d in cfg.distances),
            'angles: %s' % ','.join(str(a) for a in cfg.angles),
            'symmetric: %s' % ('true' if cfg.symmetric else 'false')]
