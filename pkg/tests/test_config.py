from pathlib import Path

import pytest

from emphi.common.exceptions import ConfigError
from emphi.config import Ablations, config_echo, load_config, merge_overrides, require_paths


def test_defaults():
    config = load_config(environ={})
    assert config.seed == 0
    assert config.training.loss_weights == (1.0, 0.5, 0.5, 1.0)
    assert config.keywords.k == 30
    assert config.model.hidden_size == 300
    assert config.corpus.vocab_max_size == 24000


def test_file_values_are_read(tiny_config_file: Path):
    config = load_config(tiny_config_file, environ={})
    assert config.seed == 3
    assert config.model.num_layers == 1
    assert config.evaluation.samples == 2


def test_precedence_defaults_file_env_flags(tmp_path: Path):
    path = tmp_path / "run.toml"
    path.write_text(f'seed = 4\n[paths]\nwork_dir = "{tmp_path / "from-file"}"\n', encoding="utf-8")
    environ = {"EMPHI_WORK_DIR": str(tmp_path / "from-env")}

    assert load_config(path, environ={}).paths.work_dir == tmp_path / "from-file"
    assert load_config(path, environ=environ).paths.work_dir == tmp_path / "from-env"
    flagged = load_config(path, {"seed": 9, "paths": {"work_dir": tmp_path / "flag"}}, environ)
    assert flagged.paths.work_dir == tmp_path / "flag"
    assert flagged.seed == 9


def test_unknown_key_is_rejected(tmp_path: Path):
    path = tmp_path / "run.toml"
    path.write_text("[training]\nlearning_rat = 0.1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="learning_rat"):
        load_config(path, environ={})


def test_negative_loss_weight_is_rejected():
    with pytest.raises(ConfigError, match="loss_weights"):
        load_config(overrides={"training": {"loss_weights": [1.0, -0.5, 0.5, 1.0]}}, environ={})


def test_missing_or_broken_file(tmp_path: Path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.toml", environ={})
    broken = tmp_path / "broken.toml"
    broken.write_text("seed = = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(broken, environ={})


def test_config_is_frozen():
    config = load_config(environ={})
    with pytest.raises(Exception):
        config.seed = 5  # type: ignore[misc]


def test_merge_overrides_is_recursive():
    base = {"training": {"learning_rate": 1.0, "batch_size": 4}, "seed": 1}
    merged = merge_overrides(base, {"training": {"batch_size": 8}})
    assert merged == {"training": {"learning_rate": 1.0, "batch_size": 8}, "seed": 1}
    assert base["training"]["batch_size"] == 4


def test_require_paths(tmp_path: Path):
    config = load_config(environ={})
    with pytest.raises(ConfigError, match="paths.data_dir is not set"):
        require_paths(config, "data_dir")
    missing = load_config(overrides={"paths": {"data_dir": tmp_path / "nope"}}, environ={})
    with pytest.raises(ConfigError, match="does not exist"):
        require_paths(missing, "data_dir")
    present = load_config(overrides={"paths": {"data_dir": tmp_path}}, environ={})
    require_paths(present, "data_dir")


def test_ablations_adjust_loss_weights_and_suffix():
    config = load_config(overrides={"training": {"ablations": {"disable_copy": True}}}, environ={})
    assert config.training.effective_loss_weights == (1.0, 0.5, 0.5, 0.0)
    assert config.training.ablations.suffix == "-wo-copy"

    no_intent = load_config(overrides={"training": {"ablations": {"disable_intent": True}}}, environ={})
    assert no_intent.training.effective_loss_weights == (1.0, 0.0, 0.5, 0.0)
    assert Ablations().suffix == ""
    assert Ablations(disable_gate=True, disable_copy=True).suffix == "-wo-gate-wo-copy"


def test_config_echo_leaves_out_paths(tmp_path: Path):
    config = load_config(overrides={"paths": {"work_dir": tmp_path}}, environ={})
    echo = config_echo(config)
    assert "paths" not in echo
    assert echo["training"]["loss_weights"] == [1.0, 0.5, 0.5, 1.0]
