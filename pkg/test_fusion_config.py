import json

from fusionkit.fusion_config import FusionConfig, get_fusion_config, reload_fusion_config


def test_shipped_defaults_validate():
    cfg = get_fusion_config()
    assert cfg.validate() == {"valid": True}
    assert cfg.get("exemplar", "restarts") == 15
    assert cfg.get_ga_config()["population_factor"] == 8
    assert cfg.get_default_seed() is None


def test_local_file_overrides_template(tmp_path):
    local = tmp_path / "local.json"
    local.write_text(json.dumps({"exemplar": {"k": 9}, "seed": 4, "unknown": {"x": 1}}))
    cfg = FusionConfig(local_file=str(local))
    assert cfg.get("exemplar", "k") == 9
    assert cfg.get("exemplar", "restarts") == 15
    assert cfg.get_default_seed() == 4
    assert "unknown" not in cfg.config


def test_broken_local_file_falls_back(tmp_path, caplog):
    local = tmp_path / "local.json"
    local.write_text("{not json")
    cfg = FusionConfig(local_file=str(local))
    assert cfg.get_solver_config()["max_iter"] == 10000
    assert "Failed to load local config" in caplog.text


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("FUSIONKIT_SEED", "123")
    monkeypatch.setenv("FUSIONKIT_LOG_LEVEL", "debug")
    cfg = reload_fusion_config()
    assert cfg.get_default_seed() == 123
    assert cfg.get("logging", "level") == "DEBUG"
    monkeypatch.setenv("FUSIONKIT_SEED", "abc")
    assert reload_fusion_config().get_default_seed() is None


def test_validation_errors():
    cfg = FusionConfig()
    cfg.config["solver"]["feasibility_tol"] = 1e-3
    assert cfg.validate()["valid"] is False
    cfg = FusionConfig()
    cfg.config["exemplar"]["k"] = 0
    assert cfg.validate() == {"valid": False, "error": "exemplar.k must be a positive integer"}
    cfg = FusionConfig()
    cfg.config["output"]["format"] = "xml"
    assert not cfg.validate()["valid"]


def test_save_round_trip(tmp_path):
    local = tmp_path / "saved.json"
    cfg = FusionConfig(local_file=str(local))
    cfg.config["ga"]["iterations"] = 77
    assert cfg.save_config()
    assert FusionConfig(local_file=str(local)).get("ga", "iterations") == 77


def test_reload_replaces_the_singleton():
    first = get_fusion_config()
    assert get_fusion_config() is first
    assert reload_fusion_config() is not first
