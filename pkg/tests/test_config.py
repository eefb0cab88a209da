from datetime import date
from pathlib import Path

import pytest
import yaml

from config import DEFAULT_CONFIG, load_run_config
from errors import ConfigError


def write_yaml(tmp_path: Path, data) -> Path:
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(data) if not isinstance(data, str) else data)
    return path


def test_default_config():
    config = load_run_config()
    assert config.config_path == DEFAULT_CONFIG
    assert config.as_of == date(2021, 11, 30)
    assert config.maturities == [10, 20, 30, "All"]
    assert config.scenarios == ["DelayedTransition", "Forest", "NDC", "NetZero2050"]
    assert config.net_bound == "mid"
    assert config.seed == 20211130
    assert config.permanence.hazard is None
    assert config.permanence.mc_paths == 2000
    assert config.netzero.discounted
    assert not config.stranding.enabled
    assert all(path.is_absolute() and path.exists() for path in config.data.all().values())


def test_overrides_replace_file_values():
    config = load_run_config(overrides={"seed": 5, "output_format": "json", "output_dir": None})
    assert config.seed == 5
    assert config.output_format == "json"
    assert config.output_dir == DEFAULT_CONFIG.parent / "out"


def test_defaults_for_an_empty_file(tmp_path):
    config = load_run_config(write_yaml(tmp_path, ""))
    assert config.carbon_discount == "riskless"
    assert config.permanence.recovery == 0.4
    assert config.termsheet.case == "01"
    assert config.data.cpi_swaps is None


def test_relative_paths_resolve_against_config_dir(tmp_path):
    config = load_run_config(write_yaml(tmp_path, {"data": {"technologies": "x.csv", "cpi_swaps": "swaps.csv"}}))
    assert config.data.technologies == tmp_path / "x.csv"
    assert config.data.cpi_swaps == tmp_path / "swaps.csv"


def test_hazard_override(tmp_path):
    config = load_run_config(write_yaml(tmp_path, {"permanence": {"hazard": 0.05}}))
    assert config.permanence.hazard == 0.05


@pytest.mark.parametrize(
    "data, key",
    [
        ({"net_bound": "median"}, "net_bound"),
        ({"carbon_discount": "junk"}, "carbon_discount"),
        ({"maturities": [0, 10]}, "maturities"),
        ({"maturities": []}, "maturities"),
        ({"as_of": "not a date"}, "as_of"),
        ({"seed": -1}, "seed"),
        ({"workers": 0}, "workers"),
        ({"scenarios": "NDC"}, "scenarios"),
        ({"permanence": {"recovery": 1.5}}, "permanence.recovery"),
        ({"permanence": {"funding": "cheap"}}, "permanence.funding"),
        ({"permanence": 3}, "permanence"),
        ({"stranding": {"p_stranded": 2}}, "stranding.p_stranded"),
        ({"sanity": {"capacity_factor": "high"}}, "sanity.capacity_factor"),
        ({"netzero": {"discounted": "false"}}, "netzero.discounted"),
        ({"stranding": {"enabled": 1}}, "stranding.enabled"),
        ({"termsheet": {"years": 0.01}}, "termsheet.years"),
    ],
)
def test_invalid_values_name_the_key(tmp_path, data, key):
    with pytest.raises(ConfigError) as exc:
        load_run_config(write_yaml(tmp_path, data))
    assert exc.value.key == key


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.yaml")


def test_invalid_yaml(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(write_yaml(tmp_path, "as_of: [2021\n"))


def test_top_level_must_be_a_mapping(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(write_yaml(tmp_path, "- a\n- b\n"))


def test_boolean_flags(tmp_path):
    config = load_run_config(write_yaml(tmp_path, {"netzero": {"discounted": False}, "stranding": {"enabled": True}}))
    assert config.netzero.discounted is False
    assert config.stranding.enabled is True


def test_termsheet_overrides(tmp_path):
    path = write_yaml(tmp_path, {"termsheet": {"case": "03", "years": 30}})
    config = load_run_config(path, {"termsheet": {"years": 10, "coupon_bps": None, "notional_busd": 2}})
    assert config.termsheet.case == "03"
    assert config.termsheet.years == 10
    assert config.termsheet.coupon_bps == 500
    assert config.termsheet.notional_busd == 2


@pytest.mark.parametrize(
    "termsheet, key",
    [
        ({"years": 0.01}, "termsheet.years"),
        ({"coupon_bps": -5}, "termsheet.coupon_bps"),
        ({"notional_busd": -1}, "termsheet.notional_busd"),
    ],
)
def test_termsheet_overrides_are_validated(tmp_path, termsheet, key):
    with pytest.raises(ConfigError) as exc:
        load_run_config(write_yaml(tmp_path, {}), {"termsheet": termsheet})
    assert exc.value.key == key
