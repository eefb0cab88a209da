"""Core value types and units shared by the pricing modules.

Dates are plain ``datetime.date`` values. Time on every curve is measured in
decimal calendar years, so an Actual/Actual (ISDA) year fraction between two
dates is simply the difference of their decimal years.
"""

from __future__ import annotations

import calendar
import math
from dataclasses import dataclass, fields
from datetime import date, timedelta
from decimal import Decimal
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
import pandas as pd
from dateutil.relativedelta import relativedelta

from constants import DECONSTRUCT_CARBON_SHARE, DECONSTRUCT_TIME_SHARE, SCENARIO_LABELS, XCE
from errors import CurrencyMismatchError, DataError, ValidationError

Number = Union[int, float, Decimal, str]


def decimal_year(d: date) -> float:
    """Calendar date as a decimal year, e.g. 2022-07-02 -> 2022 + 182/365."""
    days_in_year = 366 if calendar.isleap(d.year) else 365
    return d.year + (d.timetuple().tm_yday - 1) / days_in_year


def date_from_decimal(x: float) -> date:
    """Nearest calendar date to a decimal year."""
    year = math.floor(x)
    days_in_year = 366 if calendar.isleap(year) else 365
    return date(year, 1, 1) + timedelta(days=round((x - year) * days_in_year))


def add_months(d: date, months: float) -> date:
    """Shift a date by a (possibly fractional) number of months.

    Whole months roll with month-end clipping; the fractional remainder is
    converted to days of the month landed on.
    """
    if months < 0:
        raise ValidationError("months", f"must be >= 0, got {months}")
    whole = math.floor(months + 1e-9)
    shifted = d + relativedelta(months=whole)
    fraction = months - whole
    if fraction > 1e-9:
        month_days = calendar.monthrange(shifted.year, shifted.month)[1]
        shifted += timedelta(days=round(fraction * month_days))
    return shifted


@lru_cache(maxsize=4096)
def _grid_times(start: date, end: date, step_months: float) -> np.ndarray:
    points = [start]
    k = 1
    while True:
        d = add_months(start, k * step_months)
        if d >= end:
            break
        points.append(d)
        k += 1
    if end > points[-1]:
        points.append(end)
    times = np.array([decimal_year(p) for p in points])
    times.setflags(write=False)
    return times


@dataclass(frozen=True)
class DateGrid:
    """Dated grid from ``as_of`` over ``horizon`` years in steps of ``step`` years.

    Points are rolled from ``as_of`` in whole months where possible; the last
    point is the grid end even when it falls between steps.
    """

    as_of: date
    horizon: float
    step: float = 1 / 12
    until: Optional[date] = None

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError("step", f"must be > 0, got {self.step}")
        if self.until is None and self.horizon <= 0:
            raise ValidationError("horizon", f"must be > 0, got {self.horizon}")
        if self.until is not None and self.until < self.as_of:
            raise ValidationError("until", f"{self.until} is before {self.as_of}")

    @classmethod
    def spanning(cls, start: date, end: date, step: float = 1 / 12) -> "DateGrid":
        return cls(as_of=start, horizon=decimal_year(end) - decimal_year(start), step=step, until=end)

    @property
    def end(self) -> date:
        return self.until if self.until is not None else add_months(self.as_of, self.horizon * 12)

    def times(self) -> np.ndarray:
        """Grid points as decimal years (read-only array)."""
        return _grid_times(self.as_of, self.end, self.step * 12)

    def dates(self) -> list[date]:
        return [date_from_decimal(x) for x in self.times()]


def _to_decimal(value: Number) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, (float, np.floating)):
        return Decimal(repr(float(value)))
    return Decimal(str(value))


@dataclass(frozen=True)
class Money:
    """An amount in a cash currency (ISO-4217) or in XCE tonnes of CO2e."""

    amount: Decimal
    currency: str

    def __post_init__(self):
        object.__setattr__(self, "amount", _to_decimal(self.amount))
        if not (len(self.currency) == 3 and self.currency.isalpha() and self.currency.isupper()):
            raise ValidationError("currency", f"expected a three-letter code, got {self.currency!r}")

    @classmethod
    def of(cls, amount: Number, currency: str) -> "Money":
        return cls(_to_decimal(amount), currency)

    @property
    def is_carbon(self) -> bool:
        return self.currency == XCE

    def _check(self, other: "Money") -> None:
        if not isinstance(other, Money):
            raise TypeError(f"cannot combine Money with {type(other).__name__}")
        if other.currency != self.currency:
            raise CurrencyMismatchError(f"cannot combine {self.currency} with {other.currency}")

    def __add__(self, other: "Money") -> "Money":
        self._check(other)
        return Money(self.amount + other.amount, self.currency)

    def __sub__(self, other: "Money") -> "Money":
        self._check(other)
        return Money(self.amount - other.amount, self.currency)

    def __neg__(self) -> "Money":
        return Money(-self.amount, self.currency)

    def scale(self, factor: Number) -> "Money":
        return Money(self.amount * _to_decimal(factor), self.currency)

    def to_usd(self, usd_per_tonne: float) -> "Money":
        """Convert an XCE amount to USD at a carbon price."""
        if not self.is_carbon:
            raise CurrencyMismatchError(f"only XCE converts at a carbon price, got {self.currency}")
        return Money(self.amount * _to_decimal(usd_per_tonne), "USD")

    def __float__(self) -> float:
        return float(self.amount)

    def to_dict(self) -> dict[str, str]:
        return {"amount": str(self.amount), "currency": self.currency}

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "Money":
        return cls(Decimal(data["amount"]), data["currency"])


@dataclass(frozen=True)
class ScenarioId:
    """Carbon price scenario name (built-in NGFS names or user-defined)."""

    name: str

    def __post_init__(self):
        if not self.name or not self.name.strip():
            raise ValidationError("name", "scenario name must be nonempty")

    @property
    def builtin(self) -> bool:
        return self.name in SCENARIO_LABELS

    @property
    def label(self) -> str:
        return SCENARIO_LABELS.get(self.name, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TechnologyCase:
    """One generation technology: sizing, timing, cost and emission inputs.

    Units: size in MW, capital_cost in billions USD, develop/build in months,
    lifespan in years, carbon figures in megatonnes CO2e.
    """

    case_id: str
    name: str
    size: float
    capital_cost: float
    develop: float
    build: float
    lifespan: float
    capacity_factor: float
    carbon_per_year: float
    carbon_to_build: float
    deconstruct_carbon: Optional[float] = None
    user_supplied: bool = False

    def __post_init__(self):
        if self.deconstruct_carbon is None:
            object.__setattr__(self, "deconstruct_carbon", DECONSTRUCT_CARBON_SHARE * self.carbon_to_build)

    @property
    def deconstruct_months(self) -> float:
        return DECONSTRUCT_TIME_SHARE * self.build

    @property
    def renewable(self) -> bool:
        """No material emissions in operation."""
        return self.carbon_per_year == 0

    @property
    def label(self) -> str:
        return f"{self.case_id}, {self.name}"

    def with_deconstruct_share(self, share: float) -> "TechnologyCase":
        return _replace(self, deconstruct_carbon=share * self.carbon_to_build)


def _replace(case: TechnologyCase, **changes: Any) -> TechnologyCase:
    values = {f.name: getattr(case, f.name) for f in fields(case)}
    values.update(changes)
    return TechnologyCase(**values)


def validate_technology(case: TechnologyCase) -> TechnologyCase:
    """Return the case if every invariant holds, else raise on the first violation."""
    checks = (
        ("size", case.size > 0, "must be > 0"),
        ("capital_cost", case.capital_cost > 0, "must be > 0"),
        ("develop", case.develop >= 0, "must be >= 0"),
        ("build", case.build >= 0, "must be >= 0"),
        ("lifespan", case.lifespan > 0, "must be > 0"),
        ("capacity_factor", 0 <= case.capacity_factor <= 1, "must be in [0, 1]"),
        ("carbon_per_year", case.carbon_per_year >= 0, "must be >= 0"),
        ("carbon_to_build", case.carbon_to_build >= 0, "must be >= 0"),
        ("deconstruct_carbon", case.deconstruct_carbon >= 0, "must be >= 0"),
    )
    for name, ok, message in checks:
        if not ok:
            raise ValidationError(name, f"{message}, got {getattr(case, name)} (case {case.case_id})")
    if case.build == 0 and case.carbon_to_build > 0:
        raise ValidationError("build", f"carbon_to_build needs a build phase (case {case.case_id})")
    return case


TECHNOLOGY_COLUMNS = (
    "case_id",
    "name",
    "size",
    "capital_cost",
    "develop",
    "build",
    "lifespan",
    "capacity_factor",
    "carbon_per_year",
    "carbon_to_build",
)


def technology_to_row(case: TechnologyCase) -> dict[str, Any]:
    return {f.name: getattr(case, f.name) for f in fields(case)}


def _as_bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "y")
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return False
    return bool(value)


def technology_from_row(row: Mapping[str, Any]) -> TechnologyCase:
    missing = [c for c in TECHNOLOGY_COLUMNS if c not in row]
    if missing:
        raise DataError(f"technology row is missing columns: {', '.join(missing)}")
    deconstruct = row.get("deconstruct_carbon")
    if deconstruct is not None and isinstance(deconstruct, float) and math.isnan(deconstruct):
        deconstruct = None
    try:
        return TechnologyCase(
            case_id=str(row["case_id"]).strip(),
            name=str(row["name"]).strip(),
            size=float(row["size"]),
            capital_cost=float(row["capital_cost"]),
            develop=float(row["develop"]),
            build=float(row["build"]),
            lifespan=float(row["lifespan"]),
            capacity_factor=float(row["capacity_factor"]),
            carbon_per_year=float(row["carbon_per_year"]),
            carbon_to_build=float(row["carbon_to_build"]),
            deconstruct_carbon=None if deconstruct is None else float(deconstruct),
            user_supplied=_as_bool(row.get("user_supplied", False)),
        )
    except (TypeError, ValueError) as exc:
        raise DataError(f"bad technology row {dict(row)}: {exc}") from exc


def load_technology_cases(path: Path, deconstruct_share: Optional[float] = None) -> tuple[TechnologyCase, ...]:
    """Read and validate the technology table CSV.

    Args:
        path: CSV with the Table-of-technologies columns
        deconstruct_share: Deconstruction carbon as a share of build carbon,
            applied to rows without an explicit ``deconstruct_carbon``

    Returns:
        Validated cases in file order
    """
    if not Path(path).exists():
        raise DataError(f"technology file not found: {path}")
    frame = pd.read_csv(path, dtype={"case_id": str}, comment="#", skipinitialspace=True)
    cases = []
    for row in frame.to_dict(orient="records"):
        case = technology_from_row(row)
        explicit = row.get("deconstruct_carbon")
        has_explicit = explicit is not None and not (isinstance(explicit, float) and math.isnan(explicit))
        if deconstruct_share is not None and not has_explicit:
            case = case.with_deconstruct_share(deconstruct_share)
        cases.append(validate_technology(case))
    ids = [c.case_id for c in cases]
    if len(set(ids)) != len(ids):
        raise DataError(f"duplicate case ids in {path}")
    return tuple(cases)
