import pytest

from thresholdlab.core.config import ExperimentConfig, load_config
from thresholdlab.core.errors import ConfigError


def test_pt_bottom_range_resolves_to_ten_values(configs_dir):
    config = load_config(configs_dir / "pt_bottom.yaml")
    values = config.eps_values
    assert len(values) == 10
    assert values[0] == pytest.approx(0.05)
    assert values[-1] == pytest.approx(0.5)
    assert values == sorted(values)


def test_relative_paths_anchor_at_config_directory(configs_dir):
    config = load_config(configs_dir / "degenerate.yaml")
    assert config.modes.file == configs_dir / "degenerate_modes.csv"
    assert config.output.directory == configs_dir / "../results/degenerate"


def test_box_amplitude_accepts_scalar(configs_dir):
    config = load_config(configs_dir / "default.yaml")
    assert config.potential.form == "box"
    assert config.potential.amplitude_complex == complex(-1.0, 0.0)


def test_overrides_merge_nested_blocks(configs_dir):
    config = load_config(configs_dir / "pt_bottom.yaml", {"solver": {"n2": 800}})
    assert config.solver.n2 == 800
    assert config.solver.x0 == pytest.approx(400.0)


def test_explicit_values_are_sorted_and_deduplicated():
    config = ExperimentConfig.model_validate({"epsilon": {"values": [0.3, 0.1, 0.3]}})
    assert config.eps_values == [0.1, 0.3]


def test_non_positive_epsilon_rejected(configs_dir):
    with pytest.raises(ConfigError) as excinfo:
        load_config(configs_dir / "pt_bottom.yaml", {"epsilon": {"values": [0.1, -0.2]}})
    assert any(path.startswith("epsilon") for path in excinfo.value.field_paths)


def test_threshold_beyond_mode_count_rejected(configs_dir):
    with pytest.raises(ConfigError):
        load_config(configs_dir / "pt_bottom.yaml", {"threshold": 9})


def test_manufactured_threshold_checked_against_eigenvalues(configs_dir):
    with pytest.raises(ConfigError):
        load_config(configs_dir / "degenerate.yaml", {"threshold": 4})


def test_box_without_ranges_rejected(tmp_path):
    path = tmp_path / "box.yaml"
    path.write_text("potential:\n  form: box\n  amplitude: -1.0\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_malformed_yaml_raises_config_error(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("name: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_non_mapping_root_rejected(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)
