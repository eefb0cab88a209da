"""Command-line interface: load market data, evaluate grids, write reports."""

from __future__ import annotations

import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

from constants import FOREST_SCENARIO, SCENARIO_LABELS, USD_PER_BUSD
from config import RunConfig, load_run_config
from curves import (
    DiscountCurve,
    InflationIndex,
    NetCostCurve,
    NetTechnology,
    PriceCurve,
    build_carbon_curve,
    build_discount_curve,
    build_inflation_index,
    build_net_cost_curve,
    load_cpi,
    load_cpi_swaps,
    load_net_table,
    load_rates,
    load_scenarios,
)
from domain import ScenarioId, TechnologyCase, add_months, load_technology_cases
from emissions import EmissionProfile, build_profile
from errors import EXIT_CONFIG, EXIT_DATA, EXIT_OK, CepError, ConfigError, DataError
from netzero import required_net_capacity
from permanence import PermanenceModel, adjusted_cost_curve, permanence_table
from pricing import (
    carbon_cost_npv,
    carbon_spread_bps,
    financing_end,
    operation_end,
    stranded_spread_multiplier,
    stranding_date,
)
from reports import Report, write_report
from reports.sections import (
    CPI_SERIES_COLUMNS,
    EMISSION_PATH_COLUMNS,
    NET_SERIES_COLUMNS,
    PROFILE_COLUMNS,
    SANITY_COLUMNS,
    SCENARIO_SERIES_COLUMNS,
    format_capacity,
    format_spread,
    get_cpi_series,
    get_emission_path_series,
    get_grid_columns,
    get_grid_rows,
    get_net_series,
    get_permanence_columns,
    get_permanence_rows,
    get_profile_series,
    get_provenance,
    get_sanity_row,
    get_scenario_series,
)
from termsheet import events_to_rows, generate_termsheet, lifecycle_schedule, to_json, validate_termsheet

logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


@dataclass
class MarketData:
    """Validated inputs and curves shared by every subcommand."""

    config: RunConfig
    cases: tuple[TechnologyCase, ...]
    index: InflationIndex
    riskless: DiscountCurve
    scenario_series: dict[ScenarioId, tuple[tuple[int, float], ...]]
    nets: tuple[NetTechnology, ...]
    profiles: dict[str, EmissionProfile] = field(default_factory=dict)

    @property
    def as_of(self) -> date:
        return self.config.as_of

    @property
    def horizon(self) -> date:
        return add_months(self.as_of, self.config.horizon_years * 12)

    @cached_property
    def risky(self) -> DiscountCurve:
        return self.riskless.with_spread(self.config.risky_spread_bps)

    @property
    def carbon_curve(self) -> DiscountCurve:
        return self.risky if self.config.carbon_discount == "risky" else self.riskless

    @cached_property
    def net_curves(self) -> list[NetCostCurve]:
        return [build_net_cost_curve(t, self.config.net_bound, self.index, self.as_of) for t in self.nets]

    @cached_property
    def permanence_model(self) -> PermanenceModel:
        perm = self.config.permanence
        funding = self.risky if perm.funding == "risky" else self.riskless
        if perm.hazard is not None:
            return PermanenceModel(hazard=perm.hazard, recovery=perm.recovery, funding_curve=funding, t_perm=perm.t_perm)
        return PermanenceModel.from_credit(
            funding,
            physical_hazard=perm.physical_hazard,
            financial_spread_bps=perm.financial_spread_bps,
            recovery=perm.recovery,
            t_perm=perm.t_perm,
        )

    @cached_property
    def forest_curve(self):
        """Cheapest permanence-adjusted NET cost as a price curve."""
        return adjusted_cost_curve(self.net_curves, self.permanence_model, self.as_of, self.horizon, self.index)

    @cached_property
    def price_curves(self) -> dict[str, PriceCurve]:
        curves = {}
        series = {s.name: raw for s, raw in self.scenario_series.items()}
        for name in self.config.scenarios:
            if name == FOREST_SCENARIO:
                curves[name] = self.forest_curve
            elif name in series:
                curves[name] = build_carbon_curve(series[name], ScenarioId(name), self.index, self.horizon)
            else:
                raise DataError(f"scenario {name!r} is not in {self.config.data.scenarios}")
        return curves

    def profile(self, case: TechnologyCase) -> EmissionProfile:
        return self.profiles[case.case_id]

    def case(self, case_id: str) -> TechnologyCase:
        for case in self.cases:
            if case.case_id == case_id:
                return case
        raise DataError(f"unknown technology case {case_id!r}")

    def provenance(self, command: str, seed: Optional[int] = None) -> dict:
        return get_provenance(command, self.config.config_path, self.config.data.all(), seed)


def load_market(config: RunConfig) -> MarketData:
    """Read and validate every input file named in the config."""
    paths = config.data
    cases = load_technology_cases(paths.technologies, deconstruct_share=config.deconstruct_fraction)
    swaps = load_cpi_swaps(paths.cpi_swaps) if paths.cpi_swaps is not None else ()
    index = build_inflation_index(load_cpi(paths.cpi), swaps)
    riskless = build_discount_curve(config.as_of, load_rates(paths.rates))
    market = MarketData(
        config=config,
        cases=cases,
        index=index,
        riskless=riskless,
        scenario_series=load_scenarios(paths.scenarios),
        nets=load_net_table(paths.net_costs),
        profiles={case.case_id: build_profile(case, config.as_of) for case in cases},
    )
    logger.info("loaded %d cases, %d scenarios, %d NETs", len(cases), len(market.scenario_series), len(market.nets))
    return market


def _evaluate_grid(tasks: Sequence, fn: Callable, workers: int) -> list:
    """Evaluate ``fn`` over ``tasks``; results come back in task order."""
    if workers <= 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _scenario_ids(names: Iterable[str]) -> list[ScenarioId]:
    return [ScenarioId(name) for name in names]


def cmd_spreads(config: RunConfig, market: Optional[MarketData] = None) -> list[Report]:
    """Annuity spread (bps) for every case, scenario and maturity."""
    market = market or load_market(config)
    curves = market.price_curves
    scenarios = _scenario_ids(curves)
    tasks = [(case, s.name, m) for case in market.cases for s in scenarios for m in config.maturities]

    curve = market.carbon_curve

    def price(task):
        case, scenario, maturity = task
        return carbon_spread_bps(case, curves[scenario], curve, maturity, profile=market.profile(case))

    values = _evaluate_grid(tasks, price, config.workers)
    results = {(case.case_id, s, m): v for (case, s, m), v in zip(tasks, values)}
    columns = get_grid_columns(config.maturities)
    rows = get_grid_rows(market.cases, scenarios, config.maturities, results, format_spread)

    if config.stranding.enabled:
        columns = columns + ["stranding_date", "spread_multiplier"]
        strand = config.stranding
        k = 0
        for case in market.cases:
            for s in scenarios:
                when = stranding_date(case, market.profile(case), curves[s.name], strand.revenue_usd_per_mwh, strand.cost_share)
                multiplier = 1.0
                if when is not None and when < operation_end(market.profile(case)):
                    multiplier = stranded_spread_multiplier(strand.base_recovery, strand.stranded_recovery, strand.p_stranded)
                rows[k] += [when.isoformat() if when else "", f"{multiplier:.2f}"]
                k += 1

    return [
        Report(
            name="spreads",
            title="Annuity spread (bps) by financing maturity",
            columns=columns,
            rows=rows,
            provenance=market.provenance("spreads"),
        )
    ]


def cmd_netzero(config: RunConfig, market: Optional[MarketData] = None) -> list[Report]:
    """NET capacity (MT/yr) for financial net-zero; NGFS scenarios only."""
    market = market or load_market(config)
    curves = {name: curve for name, curve in market.price_curves.items() if name != FOREST_SCENARIO}
    net_cost = market.forest_curve
    scenarios = _scenario_ids(curves)
    tasks = [(case, s.name, m) for case in market.cases for s in scenarios for m in config.maturities]
    curve = market.carbon_curve

    def solve(task):
        case, scenario, maturity = task
        profile = market.profile(case)
        end = financing_end(profile, market.as_of, maturity)
        npv = carbon_cost_npv(profile, curves[scenario], curve, market.as_of, end)
        return required_net_capacity(npv, curves[scenario], net_cost, curve, market.as_of, end, discounted=config.netzero.discounted)

    values = _evaluate_grid(tasks, solve, config.workers)
    results = {(case.case_id, s, m): v for (case, s, m), v in zip(tasks, values)}
    return [
        Report(
            name="netzero",
            title="NET capacity (MT/year) required for financial net-zero",
            columns=get_grid_columns(config.maturities),
            rows=get_grid_rows(market.cases, scenarios, config.maturities, results, format_capacity),
            provenance=market.provenance("netzero"),
            notes=["NA: no solution; 0.0: required capacity below 0.1 MT/year"],
        )
    ]


def cmd_permanence(config: RunConfig, market: Optional[MarketData] = None) -> list[Report]:
    """Raw, add-on and adjusted NET costs on annual dates."""
    market = market or load_market(config)
    perm = config.permanence
    points = permanence_table(
        market.net_curves,
        market.permanence_model,
        market.as_of,
        market.horizon,
        mc_paths=perm.mc_paths,
        seed=config.seed,
        workers=config.workers,
    )
    with_mc = perm.mc_paths > 0
    model = market.permanence_model
    return [
        Report(
            name="permanence",
            title="Permanence-adjusted NET cost (USD per tonne)",
            columns=get_permanence_columns(with_mc),
            rows=get_permanence_rows(points, with_mc),
            provenance=market.provenance("permanence", config.seed if with_mc else None),
            notes=[f"hazard {model.hazard:.6f}/yr, recovery {model.recovery:g}, horizon {model.t_perm:g}y, bound {config.net_bound}"],
        )
    ]


def cmd_termsheet(
    config: RunConfig,
    case_id: Optional[str] = None,
    years: Optional[float] = None,
    coupon_bps: Optional[float] = None,
    notional_busd: Optional[float] = None,
    market: Optional[MarketData] = None,
) -> tuple[str, Report]:
    """Linked termsheet JSON and its lifecycle event schedule."""
    market = market or load_market(config)
    defaults = config.termsheet
    case = market.case(case_id or defaults.case)
    years = years if years is not None else defaults.years
    notional_busd = notional_busd if notional_busd is not None else defaults.notional_busd
    ts = generate_termsheet(
        case,
        financing_years=years,
        coupon_bps=coupon_bps if coupon_bps is not None else defaults.coupon_bps,
        as_of=market.as_of,
        notional_usd=None if notional_busd is None else notional_busd * USD_PER_BUSD,
        profile=market.profile(case),
    )
    warnings = validate_termsheet(ts)
    provenance = market.provenance("termsheet")
    rows = events_to_rows(lifecycle_schedule(ts))
    columns = list(rows[0]) if rows else ["date", "kind", "amount", "currency", "description"]
    report = Report(
        name=f"termsheet_{case.case_id}_{years:g}y_events",
        title=f"Lifecycle events, case {case.case_id}, {years:g}y",
        columns=columns,
        rows=[[str(r[c]) for c in columns] for r in rows],
        provenance=provenance,
        notes=warnings,
    )
    return to_json(ts, meta=provenance), report


def cmd_sanity(config: RunConfig, market: Optional[MarketData] = None) -> list[Report]:
    """Operating emissions from an independent emission factor vs the table value."""
    market = market or load_market(config)
    row = get_sanity_row(config.sanity, market.case(config.sanity.reference_case))
    logger.info("sanity: %s MT/yr computed vs %s MT/yr in table, %s", row[4], row[5], row[-1])
    return [
        Report(
            name="sanity",
            title="Operating-emissions sanity check",
            columns=SANITY_COLUMNS,
            rows=[row],
            provenance=market.provenance("sanity"),
            notes=[f"pass band: relative difference <= {config.sanity.band:g}"],
        )
    ]


def cmd_ingest(config: RunConfig, market: Optional[MarketData] = None) -> list[Report]:
    """Validate inputs and emit plot-ready series."""
    market = market or load_market(config)
    years = int(config.horizon_years)
    labels = {name: SCENARIO_LABELS.get(name, name) for name in market.price_curves}
    profiles = [market.profile(c) for c in market.cases]
    provenance = market.provenance("ingest")
    return [
        Report("scenario_curves", "Nominal carbon price (USD per tonne)", SCENARIO_SERIES_COLUMNS,
               get_scenario_series(market.price_curves, labels, market.as_of, years), provenance),
        Report("net_costs", "NET cost before permanence (USD per tonne)", NET_SERIES_COLUMNS,
               get_net_series(market.net_curves, market.as_of, years), provenance),
        Report("cpi", "CPI index levels", CPI_SERIES_COLUMNS, get_cpi_series(market.index), provenance),
        Report("emission_profiles", "Emission profile steps", PROFILE_COLUMNS, get_profile_series(profiles), provenance),
        Report("emission_paths", "Monthly emission rate and cumulative tonnes", EMISSION_PATH_COLUMNS,
               get_emission_path_series(profiles), provenance),
    ]


def _add_global_flags(parser: argparse.ArgumentParser, default: Any = None) -> None:
    parser.add_argument("--config", type=Path, default=default, help="run configuration YAML (default: cep.yaml)")
    parser.add_argument("--out", type=Path, default=default, help="output directory")
    parser.add_argument("--format", choices=("csv", "markdown", "json"), default=default, help="report format")
    parser.add_argument("--seed", type=int, default=default, help="Monte-Carlo seed")
    parser.add_argument("-v", "--verbose", action="store_true", default=False if default is None else default, help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cep", description="Carbon Equivalence Principle project-finance pricing")
    _add_global_flags(parser)

    # Subcommands accept the global flags too; unset ones keep the top-level value.
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "spreads": "annuity spreads by case, scenario and maturity",
        "netzero": "NET capacity for financial net-zero",
        "permanence": "permanence-adjusted NET cost curves",
        "sanity": "operating-emissions cross-check",
        "ingest": "validate inputs and emit plot-ready series",
        "termsheet": "linked cash/XCE termsheet for one case",
    }
    for name, help_text in commands.items():
        _add_global_flags(sub.add_parser(name, help=help_text), default=argparse.SUPPRESS)
    ts = sub.choices["termsheet"]
    ts.add_argument("--case", default=None, help="technology case id")
    ts.add_argument("--years", type=float, default=None, help="financing years")
    ts.add_argument("--coupon-bps", type=float, default=None, help="fixed coupon in bps")
    ts.add_argument("--notional-busd", type=float, default=None, help="notional in billions USD")
    return parser


def run(args: argparse.Namespace) -> list[Path]:
    """Execute one subcommand and write its outputs."""
    overrides = {
        "output_dir": args.out.resolve() if args.out is not None else None,
        "output_format": args.format,
        "seed": args.seed,
    }
    if args.command == "termsheet":
        overrides["termsheet"] = {
            "case": args.case,
            "years": args.years,
            "coupon_bps": args.coupon_bps,
            "notional_busd": args.notional_busd,
        }
    config = load_run_config(args.config, overrides)
    fmt = config.output_format

    if args.command == "termsheet":
        document, events = cmd_termsheet(config)
        config.output_dir.mkdir(parents=True, exist_ok=True)
        json_path = config.output_dir / f"{events.name.removesuffix('_events')}.json"
        json_path.write_text(document + "\n")
        return [json_path, write_report(events, config.output_dir, fmt)]

    commands = {
        "spreads": cmd_spreads,
        "netzero": cmd_netzero,
        "permanence": cmd_permanence,
        "sanity": cmd_sanity,
        "ingest": cmd_ingest,
    }
    reports = commands[args.command](config)
    return [write_report(report, config.output_dir, fmt) for report in reports]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        paths = run(args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (CepError, ValueError) as exc:
        logger.error("data error: %s", exc)
        return EXIT_DATA
    for path in paths:
        logger.info("wrote %s", path)
    return EXIT_OK
