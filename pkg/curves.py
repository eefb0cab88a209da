"""Term structures: discount curves, CPI index, carbon price and NET cost curves.

All curves are immutable once built and are evaluated on decimal-year times
(see ``domain.decimal_year``); the ``*_t`` methods accept scalars or numpy
arrays.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping, Optional, Protocol, Sequence, Union

import numpy as np
import pandas as pd

from constants import BPS, NET_BASE_YEAR, NET_EMERGENT_YEAR, NET_MULTIPLIERS, SCENARIO_BASE_YEAR
from domain import ScenarioId, add_months, decimal_year
from errors import CurveError, DataError, UnavailableError, ValidationError

logger = logging.getLogger(__name__)

TimeLike = Union[float, np.ndarray]


def _scalar_or_array(values: np.ndarray) -> TimeLike:
    return float(values) if np.ndim(values) == 0 else values


class PriceCurve(Protocol):
    """Anything that prices a tonne of CO2e in nominal USD over time."""

    @property
    def horizon_t(self) -> float: ...

    def price_t(self, x: TimeLike) -> TimeLike: ...


@dataclass(frozen=True)
class DiscountCurve:
    """Zero curve with continuously compounded rates and a flat spread in bps.

    Discount factors are log-linear between knots; beyond the last knot the
    terminal zero rate is held flat.
    """

    as_of: date
    knots: tuple[tuple[date, float], ...]
    flat_spread: float = 0.0

    def __post_init__(self):
        if not self.knots:
            raise CurveError("discount curve needs at least one knot")
        origin = decimal_year(self.as_of)
        tau = np.array([decimal_year(d) - origin for d, _ in self.knots])
        rates = np.array([r for _, r in self.knots], dtype=float)
        if not np.all(np.isfinite(rates)):
            raise CurveError("discount curve rates must be finite")
        if tau[0] <= 0 or np.any(np.diff(tau) <= 0):
            raise CurveError("discount curve knot dates must be strictly increasing and after as_of")
        object.__setattr__(self, "_origin", origin)
        object.__setattr__(self, "_tau", np.concatenate([[0.0], tau]))
        object.__setattr__(self, "_rt", np.concatenate([[0.0], rates * tau]))
        object.__setattr__(self, "_terminal_rate", float(rates[-1]))
        if np.any(np.diff(self._rt) < 0):
            logger.warning("discount curve has negative forward rates; discount factors are not monotone")

    def discount_t(self, x: TimeLike) -> TimeLike:
        tau = np.asarray(x, dtype=float) - self._origin
        if np.any(tau < -1e-12):
            raise CurveError(f"discount requested before curve as_of {self.as_of}")
        tau = np.maximum(tau, 0.0)
        rt = np.where(tau <= self._tau[-1], np.interp(tau, self._tau, self._rt), self._terminal_rate * tau)
        return _scalar_or_array(np.exp(-(rt + self.flat_spread / BPS * tau)))

    def discount(self, d: date) -> float:
        return self.discount_t(decimal_year(d))

    def forward_discount_t(self, start: float, end: TimeLike) -> TimeLike:
        """D(start, end) = D(end) / D(start)."""
        return self.discount_t(end) / self.discount_t(start)

    def zero_rate(self, d: date) -> float:
        tau = decimal_year(d) - self._origin
        if tau <= 0:
            return self._rt[1] / self._tau[1] + self.flat_spread / BPS
        return -math.log(self.discount(d)) / tau

    def with_spread(self, spread_bps: float) -> "DiscountCurve":
        return DiscountCurve(as_of=self.as_of, knots=self.knots, flat_spread=spread_bps)


def build_discount_curve(as_of: date, market_rates: Sequence[tuple[float, float]], spread_bps: float = 0.0) -> DiscountCurve:
    """Build a discount curve from (tenor in years, continuous zero rate) pairs.

    Args:
        as_of: Curve date, D(as_of) = 1
        market_rates: Zero rates by tenor, tenors strictly increasing
        spread_bps: Flat spread added to every zero rate

    Returns:
        DiscountCurve
    """
    if not market_rates:
        raise CurveError("discount curve needs at least one knot")
    tenors = [float(t) for t, _ in market_rates]
    if tenors[0] <= 0 or any(b <= a for a, b in zip(tenors, tenors[1:])):
        raise CurveError(f"tenors must be positive and strictly increasing, got {tenors}")
    knots = tuple((add_months(as_of, t * 12), float(r)) for t, r in market_rates)
    return DiscountCurve(as_of=as_of, knots=knots, flat_spread=float(spread_bps))


@dataclass(frozen=True)
class InflationIndex:
    """CPI levels by year (historical then projected), log-linear within a year.

    A level for year Y is taken to hold on 1 January of Y. Beyond the last
    year the index grows at ``tail_rate`` per year.
    """

    base_year: int
    factors: tuple[tuple[int, float], ...]
    tail_rate: float = 0.0
    observed_until: Optional[int] = None

    def __post_init__(self):
        if not self.factors:
            raise CurveError("inflation index needs at least one level")
        years = np.array([y for y, _ in self.factors], dtype=float)
        levels = np.array([v for _, v in self.factors], dtype=float)
        if np.any(np.diff(years) <= 0):
            raise CurveError("inflation index years must be strictly increasing")
        if np.any(levels <= 0):
            raise CurveError("inflation index levels must be positive")
        if self.base_year != int(years[0]):
            raise CurveError(f"base_year {self.base_year} must be the first index year {int(years[0])}")
        object.__setattr__(self, "_years", years)
        object.__setattr__(self, "_log_levels", np.log(levels))

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(y for y, _ in self.factors)

    def covers(self, year: int) -> bool:
        return year in self.years

    def level(self, x: TimeLike) -> TimeLike:
        x = np.asarray(x, dtype=float)
        if np.any(x < self._years[0]):
            raise CurveError(f"inflation index starts in {int(self._years[0])}")
        last = self._years[-1]
        inside = np.exp(np.interp(x, self._years, self._log_levels))
        beyond = np.exp(self._log_levels[-1]) * (1.0 + self.tail_rate) ** np.maximum(x - last, 0.0)
        return _scalar_or_array(np.where(x <= last, inside, beyond))


def build_inflation_index(history: Mapping[int, float], swaps: Sequence[tuple[float, float]] = (), default_rate: float = 0.0) -> InflationIndex:
    """Extend historical CPI with zero-coupon CPI-swap implied levels.

    Year ``last + n`` is projected as ``CPI(last) * (1 + z(n)) ** n`` with z
    interpolated linearly in tenor; past the longest tenor the index grows at
    that tenor's rate.
    """
    if not history:
        raise DataError("CPI history is empty")
    years = sorted(int(y) for y in history)
    factors = [(y, float(history[y])) for y in years]
    tail = default_rate
    if swaps:
        tenors = np.array([float(t) for t, _ in swaps])
        rates = np.array([float(r) for _, r in swaps])
        if np.any(np.diff(tenors) <= 0) or tenors[0] <= 0:
            raise DataError("CPI swap tenors must be positive and strictly increasing")
        last_year, last_level = factors[-1]
        for n in range(1, int(math.floor(tenors[-1])) + 1):
            z = float(np.interp(n, tenors, rates))
            factors.append((last_year + n, last_level * (1.0 + z) ** n))
        tail = float(rates[-1])
    return InflationIndex(base_year=years[0], factors=tuple(factors), tail_rate=tail, observed_until=years[-1])


def inflation_adjust(amount: float, base_year: int, target: Union[date, float], index: InflationIndex) -> float:
    """Convert an amount in ``base_year`` USD to nominal USD at ``target``."""
    if not index.covers(base_year):
        raise CurveError(f"inflation index is missing base year {base_year}")
    x = decimal_year(target) if isinstance(target, date) else float(target)
    return amount * index.level(x) / index.level(float(base_year))


@dataclass(frozen=True)
class CarbonPriceCurve:
    """Nominal USD per tonne CO2e, linear between knots, constant real beyond.

    Before the first knot the first price is held. Queries past ``horizon``
    are rejected.
    """

    scenario: ScenarioId
    knots: tuple[tuple[date, float], ...]
    index: InflationIndex
    horizon: date
    extrapolation: str = "constant-real"

    def __post_init__(self):
        if not self.knots:
            raise CurveError(f"{self.scenario}: price curve needs at least one knot")
        x = np.array([decimal_year(d) for d, _ in self.knots])
        p = np.array([v for _, v in self.knots], dtype=float)
        if np.any(np.diff(x) <= 0):
            raise CurveError(f"{self.scenario}: knot dates must be strictly increasing")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise CurveError(f"{self.scenario}: prices must be finite and >= 0")
        if self.extrapolation != "constant-real":
            raise CurveError(f"unsupported extrapolation {self.extrapolation!r}")
        object.__setattr__(self, "_x", x)
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_horizon_t", decimal_year(self.horizon))
        object.__setattr__(self, "_last_level", self.index.level(x[-1]))

    @property
    def horizon_t(self) -> float:
        return self._horizon_t

    def price_t(self, x: TimeLike) -> TimeLike:
        x = np.asarray(x, dtype=float)
        if np.any(x > self._horizon_t + 1e-9):
            raise CurveError(f"{self.scenario}: curve horizon {self.horizon} is shorter than requested")
        inside = np.interp(x, self._x, self._p)
        last = self._x[-1]
        if np.any(x > last):
            real_flat = self._p[-1] * self.index.level(np.maximum(x, last)) / self._last_level
            inside = np.where(x > last, real_flat, inside)
        return _scalar_or_array(inside)

    def price(self, d: date) -> float:
        return self.price_t(decimal_year(d))


def build_carbon_curve(
    raw: Sequence[tuple[int, float]],
    scenario: ScenarioId,
    index: InflationIndex,
    horizon: date,
    base_year: int = SCENARIO_BASE_YEAR,
) -> CarbonPriceCurve:
    """Build a nominal carbon price curve from a (year, base-year USD/t) series."""
    if not raw:
        raise DataError(f"{scenario}: empty price series")
    years = [int(y) for y, _ in raw]
    if any(b <= a for a, b in zip(years, years[1:])):
        raise DataError(f"{scenario}: price series years must be sorted and unique")
    for year, price in raw:
        if price < 0:
            raise ValidationError("usd2010_per_tonne", f"{scenario} {year}: negative price {price}")
    knots = tuple((date(int(y), 1, 1), inflation_adjust(float(p), base_year, date(int(y), 1, 1), index)) for y, p in raw)
    return CarbonPriceCurve(scenario=scenario, knots=knots, index=index, horizon=horizon)


@dataclass(frozen=True)
class NetTechnology:
    """One row of the negative-emissions cost table (costs in 2011 USD/t)."""

    name: str
    mature_from: int
    low: float
    high: float

    def base_cost(self, bound: str) -> float:
        if bound == "low":
            return self.low
        if bound == "high":
            return self.high
        if bound == "mid":
            return 0.5 * (self.low + self.high)
        raise ValidationError("bound", f"expected low, high or mid, got {bound!r}")


@dataclass(frozen=True)
class NetCostCurve:
    """Nominal cost per tonne sequestered for one NET and cost bound.

    Emerging technologies start at ``initial_multiplier`` times the mature
    cost in ``emergent_from``, falling linearly to 1x at ``mature_from``; the
    real cost is flat after that.
    """

    technology: str
    bound: str
    mature_from: int
    base_cost: float
    index: InflationIndex
    available_from: int
    initial_multiplier: float = 1.0
    emergent_from: int = NET_EMERGENT_YEAR
    base_year: int = NET_BASE_YEAR

    def __post_init__(self):
        if not self.index.covers(self.base_year):
            raise CurveError(f"inflation index is missing base year {self.base_year}")
        object.__setattr__(self, "_base_level", self.index.level(float(self.base_year)))

    def multiplier_t(self, x: TimeLike) -> TimeLike:
        x = np.asarray(x, dtype=float)
        if self.mature_from <= self.emergent_from:
            return _scalar_or_array(np.ones_like(x))
        return _scalar_or_array(np.interp(x, [self.emergent_from, self.mature_from], [self.initial_multiplier, 1.0]))

    def available_t(self, x: TimeLike) -> np.ndarray:
        return np.asarray(x, dtype=float) >= self.available_from

    def cost_t(self, x: TimeLike) -> TimeLike:
        """Nominal cost; NaN where the technology is not yet available."""
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, float(self.available_from))
        nominal = self.base_cost * np.asarray(self.multiplier_t(safe)) * np.asarray(self.index.level(safe)) / self._base_level
        return _scalar_or_array(np.where(self.available_t(x), nominal, np.nan))

    def is_available(self, d: date) -> bool:
        return bool(self.available_t(decimal_year(d)))

    def cost(self, d: date) -> float:
        if not self.is_available(d):
            raise UnavailableError(f"{self.technology} is unavailable before {self.available_from} (asked {d})")
        return self.cost_t(decimal_year(d))


def build_net_cost_curve(
    tech: NetTechnology,
    bound: str,
    index: InflationIndex,
    as_of: date,
    multipliers: Mapping[str, float] = NET_MULTIPLIERS,
    emergent_from: int = NET_EMERGENT_YEAR,
) -> NetCostCurve:
    """Cost curve for one NET: available now if mature, else from ``emergent_from``."""
    base = tech.base_cost(bound)
    if tech.mature_from <= as_of.year:
        available_from, initial = tech.mature_from, 1.0
    else:
        available_from, initial = emergent_from, float(multipliers[bound])
    return NetCostCurve(
        technology=tech.name,
        bound=bound,
        mature_from=tech.mature_from,
        base_cost=base,
        index=index,
        available_from=available_from,
        initial_multiplier=initial,
        emergent_from=emergent_from,
    )


def cheapest_net_t(x: TimeLike, curves: Sequence[NetCostCurve]) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise cheapest cost and the index of the curve providing it.

    Ties go to the earlier curve; points with nothing available get NaN / -1.
    """
    costs = np.vstack([np.atleast_1d(np.asarray(c.cost_t(x), dtype=float)) for c in curves])
    missing = np.all(np.isnan(costs), axis=0)
    filled = np.where(np.isnan(costs), np.inf, costs)
    which = np.argmin(filled, axis=0)
    best = filled[which, np.arange(filled.shape[1])]
    return np.where(missing, np.nan, best), np.where(missing, -1, which)


def cheapest_net(t: date, curves: Sequence[NetCostCurve]) -> tuple[str, float]:
    """Cheapest available NET at ``t`` as (technology, USD/t)."""
    if not curves:
        raise UnavailableError("no NET cost curves supplied")
    best, which = cheapest_net_t(decimal_year(t), curves)
    if which[0] < 0:
        raise UnavailableError(f"no NET available on {t}")
    return curves[int(which[0])].technology, float(best[0])


def _read_csv(path: Path, columns: Sequence[str]) -> pd.DataFrame:
    if not Path(path).exists():
        raise DataError(f"data file not found: {path}")
    frame = pd.read_csv(path, comment="#", skipinitialspace=True)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing columns {', '.join(missing)}")
    if frame[list(columns)].isna().any().any():
        raise DataError(f"{path}: empty values in {', '.join(columns)}")
    return frame


def load_scenarios(path: Path) -> dict[ScenarioId, tuple[tuple[int, float], ...]]:
    """Scenario CSV {scenario, year, usd2010_per_tonne}, grouped in file order."""
    frame = _read_csv(path, ("scenario", "year", "usd2010_per_tonne"))
    series: dict[ScenarioId, tuple[tuple[int, float], ...]] = {}
    for name, group in frame.groupby("scenario", sort=False):
        series[ScenarioId(str(name))] = tuple((int(y), float(p)) for y, p in zip(group["year"], group["usd2010_per_tonne"]))
    return series


def load_cpi(path: Path) -> dict[int, float]:
    frame = _read_csv(path, ("year", "index"))
    return {int(y): float(v) for y, v in zip(frame["year"], frame["index"])}


def load_cpi_swaps(path: Path) -> list[tuple[float, float]]:
    frame = _read_csv(path, ("tenor_years", "swap_rate"))
    return [(float(t), float(r)) for t, r in zip(frame["tenor_years"], frame["swap_rate"])]


def load_rates(path: Path) -> list[tuple[float, float]]:
    frame = _read_csv(path, ("tenor_years", "zero_rate"))
    return [(float(t), float(r)) for t, r in zip(frame["tenor_years"], frame["zero_rate"])]


def load_net_table(path: Path) -> tuple[NetTechnology, ...]:
    frame = _read_csv(path, ("technology", "mature_from", "low", "high"))
    return tuple(
        NetTechnology(name=str(n).strip(), mature_from=int(m), low=float(lo), high=float(hi))
        for n, m, lo, hi in zip(frame["technology"], frame["mature_from"], frame["low"], frame["high"])
    )
