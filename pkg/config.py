"""Run configuration loading and validation for the CEP pricing engine."""

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from constants import (
    AS_OF,
    BBB_SPREAD_BPS,
    DECONSTRUCT_CARBON_SHARE,
    DEFAULT_MATURITIES,
    FINANCIAL_SPREAD_BPS,
    MATURITY_ALL,
    NET_MULTIPLIERS,
    PERMANENCE_YEARS,
    PHYSICAL_HAZARD,
    PROJECT_FINANCE_RECOVERY,
    SCENARIO_LABELS,
    SEQUESTRATION_RECOVERY,
)
from errors import ConfigError

DEFAULT_CONFIG = Path(__file__).parent / "cep.yaml"
OUTPUT_FORMATS = ("csv", "markdown", "json")
CURVE_CHOICES = ("riskless", "risky")


@dataclass
class DataPaths:
    """Input CSV files, resolved against the config file's directory."""

    technologies: Path
    scenarios: Path
    cpi: Path
    rates: Path
    net_costs: Path
    cpi_swaps: Optional[Path] = None

    def all(self) -> dict[str, Path]:
        paths = {
            "technologies": self.technologies,
            "scenarios": self.scenarios,
            "cpi": self.cpi,
            "rates": self.rates,
            "net_costs": self.net_costs,
        }
        if self.cpi_swaps is not None:
            paths["cpi_swaps"] = self.cpi_swaps
        return paths


@dataclass
class PermanenceConfig:
    """Default hazard and recovery for sequestration certificates."""

    physical_hazard: float = PHYSICAL_HAZARD
    financial_spread_bps: float = FINANCIAL_SPREAD_BPS
    recovery: float = SEQUESTRATION_RECOVERY
    t_perm: float = PERMANENCE_YEARS
    hazard: Optional[float] = None  # overrides physical + financial when set
    funding: str = "risky"
    mc_paths: int = 0
    batch_size: int = 10_000


@dataclass
class NetZeroConfig:
    """Financial net-zero solver settings."""

    discounted: bool = True


@dataclass
class StrandingConfig:
    """Optional viability heuristic and recovery assumptions for stranded assets."""

    enabled: bool = False
    revenue_usd_per_mwh: float = 80.0
    cost_share: float = 1.0
    base_recovery: float = PROJECT_FINANCE_RECOVERY
    stranded_recovery: float = 0.0
    p_stranded: float = 0.5


@dataclass
class SanityConfig:
    """Operating-emissions cross-check against a reference case."""

    size_mw: float = 650.0
    capacity_factor: float = 0.85
    emission_factor: float = 0.882  # tCO2e per MWh
    reference_case: str = "01"
    band: float = 0.25


@dataclass
class TermsheetConfig:
    """Defaults for the termsheet subcommand."""

    case: str = "01"
    years: float = 20.0
    coupon_bps: float = 500.0
    notional_busd: Optional[float] = None


@dataclass
class RunConfig:
    """Full configuration for one pricing run."""

    data: DataPaths
    as_of: date = AS_OF
    scenarios: list[str] = field(default_factory=lambda: list(SCENARIO_LABELS))
    maturities: list[Union[int, str]] = field(default_factory=lambda: list(DEFAULT_MATURITIES))
    net_bound: str = "mid"
    risky_spread_bps: float = BBB_SPREAD_BPS
    carbon_discount: str = "riskless"
    deconstruct_fraction: float = DECONSTRUCT_CARBON_SHARE
    horizon_years: float = 100.0
    output_dir: Path = Path("out")
    output_format: str = "csv"
    seed: int = 0
    workers: int = 1
    permanence: PermanenceConfig = field(default_factory=PermanenceConfig)
    netzero: NetZeroConfig = field(default_factory=NetZeroConfig)
    stranding: StrandingConfig = field(default_factory=StrandingConfig)
    sanity: SanityConfig = field(default_factory=SanityConfig)
    termsheet: TermsheetConfig = field(default_factory=TermsheetConfig)
    config_path: Optional[Path] = None


@dataclass
class CepYamlConfig:
    """Raw sections loaded from cep.yaml."""

    run: dict
    data: dict
    permanence: dict
    netzero: dict
    stranding: dict
    sanity: dict
    termsheet: dict


def _load_yaml_config(path: Path) -> CepYamlConfig:
    """Load the raw YAML sections from ``path``."""
    if not path.exists():
        raise ConfigError(f"config file not found: {path}", key="config")

    with open(path) as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}", key="config") from exc

    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping", key="config")

    sections = ("data", "permanence", "netzero", "stranding", "sanity", "termsheet")
    for name in sections:
        if not isinstance(data.get(name, {}), dict):
            raise ConfigError("must be a mapping", key=name)

    return CepYamlConfig(
        run={k: v for k, v in data.items() if k not in sections},
        data=data.get("data", {}),
        permanence=data.get("permanence", {}),
        netzero=data.get("netzero", {}),
        stranding=data.get("stranding", {}),
        sanity=data.get("sanity", {}),
        termsheet=data.get("termsheet", {}),
    )


def _number(section: dict, key: str, fallback: float, prefix: str = "", minimum: Optional[float] = None, maximum: Optional[float] = None) -> float:
    value = section.get(key, fallback)
    name = f"{prefix}{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key=name)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", key=name)
    if maximum is not None and value > maximum:
        raise ConfigError(f"must be <= {maximum}, got {value}", key=name)
    return float(value)


def _flag(section: dict, key: str, fallback: bool, prefix: str = "") -> bool:
    value = section.get(key, fallback)
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", key=f"{prefix}{key}")
    return value


def _choice(section: dict, key: str, fallback: str, choices: tuple, prefix: str = "") -> str:
    value = section.get(key, fallback)
    if value not in choices:
        raise ConfigError(f"expected one of {', '.join(map(str, choices))}, got {value!r}", key=f"{prefix}{key}")
    return value


def _parse_as_of(value: Any) -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise ConfigError(f"expected an ISO date, got {value!r}", key="as_of") from exc


def _parse_maturities(values: Any) -> list[Union[int, str]]:
    if not isinstance(values, list) or not values:
        raise ConfigError("expected a nonempty list", key="maturities")
    parsed = []
    for value in values:
        if value == MATURITY_ALL:
            parsed.append(MATURITY_ALL)
        elif isinstance(value, int) and not isinstance(value, bool) and value > 0:
            parsed.append(value)
        else:
            raise ConfigError(f"expected positive years or {MATURITY_ALL!r}, got {value!r}", key="maturities")
    return parsed


def _parse_data_paths(data: dict, base: Path) -> DataPaths:
    def resolve(key: str, fallback: Optional[str]) -> Optional[Path]:
        value = data.get(key, fallback)
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else base / path

    return DataPaths(
        technologies=resolve("technologies", "data/technologies.csv"),
        scenarios=resolve("scenarios", "data/scenarios.csv"),
        cpi=resolve("cpi", "data/cpi.csv"),
        rates=resolve("rates", "data/rates.csv"),
        net_costs=resolve("net_costs", "data/net_costs.csv"),
        cpi_swaps=resolve("cpi_swaps", None),
    )


def load_run_config(path: Optional[Path] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Load the run configuration from YAML, then apply command-line overrides.

    Args:
        path: Config file (defaults to cep.yaml next to this module)
        overrides: Top-level keys to replace (output_dir, output_format, seed);
            a "termsheet" mapping replaces keys of that section

    Returns:
        Validated RunConfig
    """
    path = Path(path) if path is not None else DEFAULT_CONFIG
    yaml_config = _load_yaml_config(path)
    overrides = dict(overrides or {})
    termsheet_overrides = overrides.pop("termsheet", None) or {}
    run = dict(yaml_config.run)
    run.update({k: v for k, v in overrides.items() if v is not None})
    base = path.parent

    # Helper to read top-level values with fallback to defaults
    def get(key: str, fallback):
        return run.get(key) if run.get(key) is not None else fallback

    scenarios = get("scenarios", list(SCENARIO_LABELS))
    if not isinstance(scenarios, list) or not scenarios or not all(isinstance(s, str) and s for s in scenarios):
        raise ConfigError("expected a nonempty list of scenario names", key="scenarios")

    seed = get("seed", 0)
    workers = get("workers", 1)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"expected a non-negative integer, got {seed!r}", key="seed")
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"expected a positive integer, got {workers!r}", key="workers")

    output_dir = Path(get("output_dir", "out"))

    perm, stranding, sanity = yaml_config.permanence, yaml_config.stranding, yaml_config.sanity
    ts = {**yaml_config.termsheet, **{k: v for k, v in termsheet_overrides.items() if v is not None}}
    hazard = perm.get("hazard")
    notional = ts.get("notional_busd")

    return RunConfig(
        data=_parse_data_paths(yaml_config.data, base),
        as_of=_parse_as_of(get("as_of", AS_OF)),
        scenarios=scenarios,
        maturities=_parse_maturities(get("maturities", list(DEFAULT_MATURITIES))),
        net_bound=_choice(run, "net_bound", "mid", tuple(NET_MULTIPLIERS)),
        risky_spread_bps=_number(run, "risky_spread_bps", BBB_SPREAD_BPS, minimum=0),
        carbon_discount=_choice(run, "carbon_discount", "riskless", CURVE_CHOICES),
        deconstruct_fraction=_number(run, "deconstruct_fraction", DECONSTRUCT_CARBON_SHARE, minimum=0),
        horizon_years=_number(run, "horizon_years", 100.0, minimum=1),
        output_dir=output_dir if output_dir.is_absolute() else base / output_dir,
        output_format=_choice(run, "output_format", "csv", OUTPUT_FORMATS),
        seed=seed,
        workers=workers,
        permanence=PermanenceConfig(
            physical_hazard=_number(perm, "physical_hazard", PHYSICAL_HAZARD, "permanence.", minimum=0),
            financial_spread_bps=_number(perm, "financial_spread_bps", FINANCIAL_SPREAD_BPS, "permanence.", minimum=0),
            recovery=_number(perm, "recovery", SEQUESTRATION_RECOVERY, "permanence.", minimum=0, maximum=0.999999),
            t_perm=_number(perm, "t_perm", PERMANENCE_YEARS, "permanence.", minimum=1),
            hazard=None if hazard is None else _number(perm, "hazard", 0.0, "permanence.", minimum=0),
            funding=_choice(perm, "funding", "risky", CURVE_CHOICES, "permanence."),
            mc_paths=int(_number(perm, "mc_paths", 0, "permanence.", minimum=0)),
            batch_size=int(_number(perm, "batch_size", 10_000, "permanence.", minimum=1)),
        ),
        netzero=NetZeroConfig(discounted=_flag(yaml_config.netzero, "discounted", True, "netzero.")),
        stranding=StrandingConfig(
            enabled=_flag(stranding, "enabled", False, "stranding."),
            revenue_usd_per_mwh=_number(stranding, "revenue_usd_per_mwh", 80.0, "stranding.", minimum=0),
            cost_share=_number(stranding, "cost_share", 1.0, "stranding.", minimum=0),
            base_recovery=_number(stranding, "base_recovery", PROJECT_FINANCE_RECOVERY, "stranding.", minimum=0, maximum=0.999999),
            stranded_recovery=_number(stranding, "stranded_recovery", 0.0, "stranding.", minimum=0, maximum=0.999999),
            p_stranded=_number(stranding, "p_stranded", 0.5, "stranding.", minimum=0, maximum=1),
        ),
        sanity=SanityConfig(
            size_mw=_number(sanity, "size_mw", 650.0, "sanity.", minimum=0),
            capacity_factor=_number(sanity, "capacity_factor", 0.85, "sanity.", minimum=0, maximum=1),
            emission_factor=_number(sanity, "emission_factor", 0.882, "sanity.", minimum=0),
            reference_case=str(sanity.get("reference_case", "01")),
            band=_number(sanity, "band", 0.25, "sanity.", minimum=0),
        ),
        termsheet=TermsheetConfig(
            case=str(ts.get("case", "01")),
            years=_number(ts, "years", 20.0, "termsheet.", minimum=0.0833),
            coupon_bps=_number(ts, "coupon_bps", 500.0, "termsheet.", minimum=0),
            notional_busd=None if notional is None else _number(ts, "notional_busd", 1.0, "termsheet.", minimum=0),
        ),
        config_path=path,
    )
