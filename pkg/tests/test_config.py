import pytest

from texpat.config import (RunConfig, build_config, config_echo,
                           config_from_dict, config_to_dict, parse_bool,
                           parse_int_tuple, read_config_file)
from texpat.errors import ValidationError


class TestDefaults:
    def test_frozen_default_values(self):
        cfg = RunConfig().validate()
        assert (cfg.window_size, cfg.gray_levels, cfg.patterns) == (8, 16, 2)
        assert cfg.trim_fraction == 0.25
        assert (cfg.knn_k, cfg.seed, cfg.frame_stride) == (1, 42, 25)
        assert cfg.distances == (1, 2)
        assert cfg.angles == (0, 45, 90, 135)
        assert cfg.symmetric is True


class TestValidate:
    @pytest.mark.parametrize('field,value', [
        ('window_size', 2), ('gray_levels', 1), ('gray_levels', 300),
        ('patterns', 0), ('patterns', 9), ('trim_fraction', 1.0),
        ('trim_fraction', -0.01), ('knn_k', 0), ('seed', -1),
        ('frame_stride', 0), ('distances', ()), ('distances', (0,)),
        ('distances', (8,)), ('angles', (0, 90)),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ValidationError):
            RunConfig(**{field: value}).validate()

    def test_distance_must_fit_window(self):
        RunConfig(window_size=8, distances=(7,)).validate()
        with pytest.raises(ValidationError):
            RunConfig(window_size=4, distances=(4,)).validate()


class TestParsers:
    def test_bool_words(self):
        for text in ('true', 'Yes', 'ON', '1'):
            assert parse_bool(text) is True
        for text in ('false', 'No', 'off', '0'):
            assert parse_bool(text) is False
        with pytest.raises(ValidationError):
            parse_bool('maybe')

    def test_int_tuple(self):
        assert parse_int_tuple('1,2') == (1, 2)
        assert parse_int_tuple(' 3 ') == (3,)
        with pytest.raises(ValidationError):
            parse_int_tuple('a,b')
        with pytest.raises(ValidationError):
            parse_int_tuple('')


class TestConfigFile:
    def test_parses_values_and_comments(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('# comment line\n'
                        'window_size = 16\n'
                        'trim_fraction=0.1  # trailing note\n'
                        'distances=1,2,3\n'
                        'symmetric=no\n')
        opts = read_config_file(path)
        assert opts == {'window_size': 16, 'trim_fraction': 0.1,
                        'distances': (1, 2, 3), 'symmetric': False}

    def test_rejects_unknown_key_with_line(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('window_size=8\nwibble=3\n')
        with pytest.raises(ValidationError, match=r':2:.*wibble'):
            read_config_file(path)

    def test_rejects_bad_value(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('window_size=eight\n')
        with pytest.raises(ValidationError, match='bad value'):
            read_config_file(path)

    def test_rejects_missing_equals(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('window_size 8\n')
        with pytest.raises(ValidationError, match='key=value'):
            read_config_file(path)


class TestMerge:
    def test_overrides_beat_file_values(self):
        cfg = build_config({'window_size': 16, 'patterns': 3},
                           {'patterns': 4, 'seed': None})
        assert cfg.window_size == 16
        assert cfg.patterns == 4
        assert cfg.seed == 42  # None means "not set", keep default

    def test_rejects_unknown_override(self):
        with pytest.raises(ValidationError, match='unknown'):
            build_config(overrides={'fold_count': 5})

    def test_merged_config_is_validated(self):
        with pytest.raises(ValidationError):
            build_config(overrides={'patterns': 99})

    def test_dict_roundtrip(self):
        cfg = RunConfig(window_size=16, patterns=3, trim_fraction=0.1)
        assert config_from_dict(config_to_dict(cfg)) == cfg


class TestEcho:
    def test_stable_lines(self):
        lines = config_echo(RunConfig())
        assert 'window_size: 8' in lines
        assert 'trim_fraction: 0.25' in lines
        assert 'distances: 1,2' in lines
        assert 'angles: 0,45,90,135' in lines
        assert 'symmetric: true' in lines
        assert len(lines) == 10
