import json

import pytest

from electrode_soh.config.run import RunConfig, load_run_config
from electrode_soh.errors import ConfigurationError


def _doc(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    return path


def test_defaults():
    cfg = load_run_config()
    assert cfg.estimator.MEASUREMENT_NOISE == 4e-6
    assert cfg.solver.PERIOD_S == 10000.0
    assert cfg.awtls.DTHETA_FLOOR == 0.05
    assert str(cfg.output_dir) == "results"


def test_json_sections_are_applied(tmp_path):
    cfg = load_run_config(_doc(tmp_path, {"estimator": {"init_soc": 0.6}, "awtls": {"window_s": 900}}))
    assert cfg.estimator.INIT_SOC == 0.6
    assert cfg.awtls.WINDOW_S == 900.0
    assert isinstance(cfg.awtls.WINDOW_S, float)


def test_cli_overrides_win(tmp_path):
    path = _doc(tmp_path, {"core": {"seed": 1, "output_dir": "from_json"}})
    cfg = load_run_config(path, {"core": {"seed": 9, "output_dir": None}})
    assert cfg.core.SEED == 9
    assert cfg.core.OUTPUT_DIR == "from_json"


def test_environment_sits_between_json_and_cli(tmp_path, monkeypatch):
    monkeypatch.setenv("ESOH_OUTPUT_DIR", "from_env")
    path = _doc(tmp_path, {"core": {"output_dir": "from_json"}})
    assert load_run_config(path).core.OUTPUT_DIR == "from_env"
    assert load_run_config(path, {"core": {"output_dir": "from_cli"}}).core.OUTPUT_DIR == "from_cli"


@pytest.mark.parametrize(
    "document",
    [
        {"estimator": {"bogus": 1}},
        {"nonsense": {}},
        {"solver": {"period_s": "often"}},
        {"core": {"plots": 1}},
        {"estimator": {"init_covariance": 0.1}},
        {"fitting": {"electrode": 3}},
        {"core": []},
    ],
)
def test_malformed_documents(tmp_path, document):
    with pytest.raises(ConfigurationError):
        load_run_config(_doc(tmp_path, document))


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigurationError):
        load_run_config(broken)


def test_command_requirements(tmp_path):
    cfg = RunConfig()
    with pytest.raises(ConfigurationError):
        cfg.validate_for("estimate")
    with pytest.raises(ConfigurationError):
        cfg.validate_for("simulate")
    with pytest.raises(ConfigurationError):
        cfg.validate_for("report")
    cfg.validate_for("fit")

    scenario = tmp_path / "s.json"
    scenario.write_text("{}")
    cfg.apply("core", {"scenario": str(scenario), "input": str(scenario)})
    with pytest.raises(ConfigurationError):
        cfg.validate_for("estimate")

    cfg.apply("core", {"input": str(tmp_path / "absent.csv")})
    with pytest.raises(ConfigurationError):
        cfg.validate_for("simulate")

    cfg = RunConfig()
    cfg.apply("fitting", {"mode": "global"})
    with pytest.raises(ConfigurationError):
        cfg.validate_for("fit")


def test_shipped_run_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parents[2] / "scenarios"
    cfg = load_run_config(root / "estimate_aged.config.json")
    assert cfg.estimator.INIT_SOC == 0.9
    cfg = load_run_config(root / "fit_positive_selffit.config.json")
    assert cfg.fitting.ELECTRODE == "positive"
