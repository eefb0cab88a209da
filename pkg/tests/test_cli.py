"""End-to-end runs of the subcommands on the bundled data."""

from pathlib import Path

import pandas as pd
import pytest
import yaml

from cli import load_market, main
from config import load_run_config
from conftest import DATA
from errors import EXIT_CONFIG, EXIT_DATA, EXIT_OK
from netzero import required_net_capacity, verify_net_zero
from pricing import carbon_cost_npv, financing_end
from termsheet import from_json

COMBUSTION = ["01", "03", "08", "09"]
RENEWABLE = ["12", "15", "17", "20", "24", "25"]
MATURITY_COLUMNS = ["10y", "20y", "30y", "All"]


def write_config(tmp_path: Path, **changes) -> Path:
    data = {
        "as_of": "2021-11-30",
        "scenarios": ["DelayedTransition", "Forest", "NDC", "NetZero2050"],
        "maturities": [10, 20, 30, "All"],
        "horizon_years": 100,
        "seed": 1,
        "workers": 2,
        "data": {
            "technologies": str(DATA / "technologies.csv"),
            "scenarios": str(DATA / "scenarios.csv"),
            "cpi": str(DATA / "cpi.csv"),
            "cpi_swaps": str(DATA / "cpi_swaps.csv"),
            "rates": str(DATA / "rates.csv"),
            "net_costs": str(DATA / "net_costs.csv"),
        },
        "permanence": {"mc_paths": 0},
    }
    data.update(changes)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


def run_command(tmp_path: Path, *args: str, out: str = "out", **changes) -> Path:
    config = write_config(tmp_path, **changes)
    out_dir = tmp_path / out
    assert main(["--config", str(config), "--out", str(out_dir), *args]) == EXIT_OK
    return out_dir


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", dtype=str, keep_default_na=False)


@pytest.fixture(scope="module")
def spreads(tmp_path_factory) -> pd.DataFrame:
    out = run_command(tmp_path_factory.mktemp("spreads"), "spreads")
    return read_table(out / "spreads.csv")


@pytest.fixture(scope="module")
def netzero(tmp_path_factory) -> pd.DataFrame:
    out = run_command(tmp_path_factory.mktemp("netzero"), "netzero")
    return read_table(out / "netzero.csv")


def cells(frame: pd.DataFrame, case: str, scenario: str) -> list[str]:
    row = frame[(frame["case"] == case) & (frame["scenario"] == scenario)]
    assert len(row) == 1
    return list(row.iloc[0][MATURITY_COLUMNS])


def test_spread_grid_shape(spreads):
    assert list(spreads.columns) == ["case", "technology", "scenario"] + MATURITY_COLUMNS
    assert len(spreads) == 10 * 4
    assert set(spreads["scenario"]) == {"Delayed transition", "Forest", "NDCs", "net-zero 2050"}


def test_combustion_spreads_rise_with_maturity(spreads):
    for case in COMBUSTION:
        for scenario in set(spreads["scenario"]):
            values = [int(v) for v in cells(spreads, case, scenario)]
            assert values == sorted(values), (case, scenario)


def test_renewable_spreads_fall_with_maturity(spreads):
    for case in RENEWABLE:
        for scenario in set(spreads["scenario"]):
            values = [int(v) for v in cells(spreads, case, scenario)]
            assert values == sorted(values, reverse=True), (case, scenario)
    assert int(cells(spreads, "24", "NDCs")[0]) > int(cells(spreads, "24", "NDCs")[2])


def test_ccs_is_cheaper_than_unabated_gas(spreads):
    for scenario in set(spreads["scenario"]):
        for gas, ccs in zip(cells(spreads, "08", scenario), cells(spreads, "09", scenario)):
            if int(gas) > 0:
                assert int(ccs) < int(gas), scenario


def test_delayed_transition_is_free_for_ten_years(spreads):
    for case in RENEWABLE:
        assert cells(spreads, case, "Delayed transition")[0] == "0"


@pytest.mark.parametrize("command", ["spreads", "netzero", "permanence", "termsheet", "sanity", "ingest"])
def test_outputs_are_reproducible(tmp_path, command):
    changes = {"permanence": {"mc_paths": 20}} if command == "permanence" else {}
    first = run_command(tmp_path, command, out="a", **changes)
    second = run_command(tmp_path, command, out="b", **changes)
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_reports_start_with_provenance(tmp_path):
    text = (run_command(tmp_path, "sanity") / "sanity.csv").read_text()
    assert text.startswith("# generator: cep-pricing")
    assert "# config run.yaml sha256: " in text
    assert "# input technologies technologies.csv sha256: " in text


def test_stranding_columns(tmp_path):
    out = run_command(tmp_path, "spreads", stranding={"enabled": True, "revenue_usd_per_mwh": 80})
    frame = read_table(out / "spreads.csv")
    assert list(frame.columns[-2:]) == ["stranding_date", "spread_multiplier"]
    renewable = frame[frame["case"].isin(RENEWABLE)]
    assert set(renewable["stranding_date"]) == {""}
    assert set(renewable["spread_multiplier"]) == {"1.00"}


def test_netzero_excludes_forest(netzero):
    assert "Forest" not in set(netzero["scenario"])
    assert len(netzero) == 10 * 3


def test_netzero_has_no_solution_before_prices_start(netzero):
    assert set(netzero[netzero["scenario"] == "Delayed transition"]["10y"]) == {"NA"}


def test_netzero_capacity_falls_with_maturity(netzero):
    ten, twenty, thirty, _ = (float(v) for v in cells(netzero, "01", "NDCs"))
    assert ten > twenty > thirty
    assert cells(netzero, "24", "NDCs")[2] == "0.0"


def test_permanence_without_defaults(tmp_path):
    out = run_command(tmp_path, "permanence", permanence={"hazard": 0.0, "mc_paths": 0})
    frame = read_table(out / "permanence.csv")
    assert set(frame["permanence_add_on"]) == {"0.00"}
    assert (frame["raw_cost"] == frame["adjusted_cost"]).all()
    assert frame["date"].iloc[0] == "2021-11-30"


def test_permanence_with_simulation(tmp_path):
    out = run_command(tmp_path, "--format", "json", "permanence", permanence={"mc_paths": 50}, horizon_years=5)
    text = (out / "permanence.json").read_text()
    assert '"seed": 1' in text
    assert '"mc_stderr"' in text


def test_termsheet(tmp_path):
    out = run_command(tmp_path, "termsheet", "--case", "01", "--years", "20", "--coupon-bps", "500", "--notional-busd", "1")
    ts = from_json((out / "termsheet_01_20y.json").read_text())
    assert ts.case_id == "01"
    assert float(ts.notional.amount) == pytest.approx(1e9)
    events = read_table(out / "termsheet_01_20y_events.csv")
    assert events["kind"].iloc[0] == "notional_exchange"
    assert events["kind"].iloc[-1] == "liability_return"


def test_sanity(tmp_path):
    out = run_command(tmp_path, "--format", "markdown", "sanity")
    text = (out / "sanity.md").read_text()
    assert "| 01 | 650 | 0.85 | 0.882 | 4.27 | 3.91 |" in text
    assert text.rstrip().splitlines()[-3].endswith("| pass |")


def test_ingest(tmp_path):
    out = run_command(tmp_path, "ingest")
    assert sorted(p.name for p in out.iterdir()) == ["cpi.csv", "emission_paths.csv", "emission_profiles.csv", "net_costs.csv", "scenario_curves.csv"]
    cpi = read_table(out / "cpi.csv")
    assert set(cpi["source"]) == {"history", "swap-implied"}


def test_unknown_case_is_a_data_error(tmp_path):
    config = write_config(tmp_path)
    assert main(["--config", str(config), "--out", str(tmp_path / "out"), "termsheet", "--case", "99"]) == EXIT_DATA


def test_missing_input_is_a_data_error(tmp_path):
    config = write_config(tmp_path, data={"technologies": str(tmp_path / "missing.csv")})
    assert main(["--config", str(config), "--out", str(tmp_path / "out"), "sanity"]) == EXIT_DATA


def test_global_flags_after_subcommand(tmp_path):
    config = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["sanity", "--config", str(config), "--out", str(out), "--format", "markdown"]) == EXIT_OK
    assert (out / "sanity.md").exists()


def test_global_flags_on_both_sides_of_subcommand(tmp_path):
    config = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["--config", str(config), "--out", str(out), "sanity", "--format", "json"]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["sanity.json"]


@pytest.mark.parametrize("flags", [["--years", "0.01"], ["--coupon-bps", "-5"], ["--notional-busd", "-1"]])
def test_termsheet_flags_out_of_range_are_config_errors(tmp_path, flags):
    config = write_config(tmp_path)
    assert main(["--config", str(config), "--out", str(tmp_path / "out"), "termsheet", *flags]) == EXIT_CONFIG
    assert not (tmp_path / "out").exists()


def test_bad_config_exit_code(tmp_path):
    config = write_config(tmp_path, net_bound="median")
    assert main(["--config", str(config), "sanity"]) == EXIT_CONFIG
    assert main(["--config", str(tmp_path / "missing.yaml"), "sanity"]) == EXIT_CONFIG


def test_netzero_residuals_on_bundled_data(tmp_path):
    market = load_market(load_run_config(write_config(tmp_path)))
    case = market.case("01")
    profile = market.profile(case)
    prices = market.price_curves["NDC"]
    for maturity in (10, 20, 30, "All"):
        end = financing_end(profile, market.as_of, maturity)
        npv = carbon_cost_npv(profile, prices, market.carbon_curve, market.as_of, end)
        solution = required_net_capacity(npv, prices, market.forest_curve, market.carbon_curve, market.as_of, end)
        assert solution.capacity > 0
        assert verify_net_zero(solution) <= 1e-6 * npv
