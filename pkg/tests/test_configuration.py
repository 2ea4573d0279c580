import pytest
from omegaconf.errors import ConfigKeyError, ValidationError

from iwasawa_k1.configuration_utils import FrozenDict, flatten_config, get_config, load_config, set_config


def test_defaults():
    conf = get_config()
    assert conf.precision.log_buffer is None
    assert conf.precision.max_modulus_bits == 31
    assert conf.linalg.max_dense_size == 243
    assert list(conf.zeta.sample_weights) == [2, 4, 6, 8, 12]
    assert conf.report.format == "text"
    assert conf.random.seed == 0


def test_yaml_and_overrides(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("linalg:\n  max_dense_size: 729\nzeta:\n  sample_weights: [4, 8]\n")
    conf = load_config(path, ["linalg.max_dense_size=81", "random.seed=7"])
    assert conf.linalg.max_dense_size == 81
    assert list(conf.zeta.sample_weights) == [4, 8]
    assert conf.random.seed == 7


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("linalg:\n  max_dense: 10\n")
    with pytest.raises(ConfigKeyError):
        load_config(path)
    with pytest.raises(ValidationError):
        load_config(overrides=["linalg.max_dense_size=many"])


def test_set_config_and_reset():
    set_config(load_config(overrides=["report.format=tsv"]))
    assert get_config().report.format == "tsv"
    set_config(None)
    assert get_config().report.format == "text"


def test_flatten_config():
    flat = dict(flatten_config(load_config()))
    assert flat["linalg.max_dense_size"] == 243
    assert flat["zeta.sample_weights.1"] == 4
    with pytest.raises(TypeError):
        flatten_config({"a": 1})


def test_frozen_dict():
    table = FrozenDict([("a", 1), ("b", 2)])
    assert table["b"] == 2
    with pytest.raises(TypeError):
        table["c"] = 3
    with pytest.raises(TypeError):
        table.update(c=3)
    with pytest.raises(TypeError):
        del table["a"]
