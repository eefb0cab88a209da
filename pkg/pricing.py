"""Day counts, annuity valuation, carbon-cost NPV and credit arithmetic."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from datetime import date
from typing import Optional, Sequence, Union

import numpy as np
from dateutil.relativedelta import relativedelta

from constants import BPS, HOURS_PER_YEAR, MATURITY_ALL, USD_PER_BUSD
from curves import DiscountCurve, PriceCurve
from domain import DateGrid, TechnologyCase, decimal_year
from emissions import EmissionProfile, build_profile
from errors import CurveError, PricingError, ValidationError

logger = logging.getLogger(__name__)

Maturity = Union[int, float, str]


class DayCount(enum.Enum):
    ACT_ACT_ISDA = "ACT/ACT"
    ACT_360 = "ACT/360"


def year_fraction(d1: date, d2: date, daycount: DayCount = DayCount.ACT_ACT_ISDA) -> float:
    """Accrual fraction between two dates."""
    if d2 < d1:
        raise ValidationError("d2", f"{d2} is before {d1}")
    if daycount is DayCount.ACT_360:
        return (d2 - d1).days / 360.0
    return decimal_year(d2) - decimal_year(d1)


@dataclass(frozen=True)
class AnnuitySpec:
    """Level annuity paying ``notional`` times the accrual on each pay date."""

    notional: float
    pay_dates: tuple[date, ...]
    daycount: DayCount = DayCount.ACT_ACT_ISDA

    def __post_init__(self):
        if self.notional <= 0:
            raise ValidationError("notional", f"must be > 0, got {self.notional}")
        if not self.pay_dates:
            raise ValidationError("pay_dates", "need at least one payment")
        if any(b <= a for a, b in zip(self.pay_dates, self.pay_dates[1:])):
            raise ValidationError("pay_dates", "must be strictly increasing")


def annual_schedule(start: date, end: date) -> tuple[date, ...]:
    """Unadjusted anniversaries of ``start`` up to ``end``, plus a final stub at ``end``."""
    if end <= start:
        raise ValidationError("end", f"{end} is not after {start}")
    dates = []
    k = 1
    while (d := start + relativedelta(years=k)) < end:
        dates.append(d)
        k += 1
    dates.append(end)
    return tuple(dates)


def annuity_npv(spec: AnnuitySpec, curve: DiscountCurve) -> float:
    """N * sum D(t_i) * dc(t_{i-1}, t_i), with t_0 the curve date."""
    if spec.pay_dates[0] <= curve.as_of:
        raise ValidationError("pay_dates", f"first pay date {spec.pay_dates[0]} is not after {curve.as_of}")
    previous = curve.as_of
    total = 0.0
    for d in spec.pay_dates:
        total += curve.discount(d) * year_fraction(previous, d, spec.daycount)
        previous = d
    return spec.notional * total


def carbon_cost_npv(profile: EmissionProfile, prices: PriceCurve, curve: DiscountCurve, t0: date, T: date) -> float:
    """Present value in USD of the carbon emitted in [t0, T].

    Each monthly cell carries its exact emissions, priced and discounted at
    the cell midpoint.
    """
    if T < t0:
        raise ValidationError("T", f"{T} is before {t0}")
    if decimal_year(T) > prices.horizon_t + 1e-9:
        raise CurveError(f"price curve horizon is shorter than {T}")
    if T == t0:
        return 0.0
    x = DateGrid.spanning(t0, T).times()
    tonnes = np.diff(profile.cumulative_t(x))
    mid = 0.5 * (x[:-1] + x[1:])
    return float(np.sum(curve.discount_t(mid) * prices.price_t(mid) * tonnes))


def operation_end(profile: EmissionProfile) -> date:
    operate = profile.phase("operate")
    if operate is None:
        raise PricingError(f"case {profile.case_id} has no operating phase")
    return operate.end


def financing_end(profile: EmissionProfile, as_of: date, maturity: Maturity) -> date:
    """Financing maturity, never past the end of operation."""
    end_of_operation = operation_end(profile)
    if maturity == MATURITY_ALL:
        return end_of_operation
    years = float(maturity)
    if years <= 0:
        raise ValidationError("maturity", f"must be > 0 or {MATURITY_ALL!r}, got {maturity}")
    whole = int(years)
    end = as_of + relativedelta(years=whole, months=round((years - whole) * 12))
    return min(end, end_of_operation)


def carbon_spread_bps(
    case: TechnologyCase,
    prices: PriceCurve,
    curve: DiscountCurve,
    maturity: Maturity,
    profile: Optional[EmissionProfile] = None,
    notional_usd: Optional[float] = None,
) -> float:
    """Carbon cost of financing expressed as an annuity spread in bps.

    Args:
        case: Technology case; its capital cost is the annuity notional
        prices: Nominal carbon price curve
        curve: Discount curve for both carbon cost and annuity
        maturity: Years, or "All" for the end of operation
        profile: Pre-built emission profile (built from the curve date if omitted)
        notional_usd: Override for the annuity notional

    Returns:
        Spread in basis points
    """
    as_of = curve.as_of
    profile = profile or build_profile(case, as_of)
    T = financing_end(profile, as_of, maturity)
    notional = notional_usd if notional_usd is not None else case.capital_cost * USD_PER_BUSD
    annuity = annuity_npv(AnnuitySpec(notional=notional, pay_dates=annual_schedule(as_of, T)), curve)
    if annuity == 0:
        raise PricingError(f"zero annuity value for case {case.case_id}")
    npv = carbon_cost_npv(profile, prices, curve, as_of, T)
    return BPS * npv / annuity


def hazard_from_cds(spread_bps: float, recovery: float) -> float:
    if not 0 <= recovery < 1:
        raise ValidationError("recovery", f"must be in [0, 1), got {recovery}")
    return spread_bps / BPS / (1.0 - recovery)


def cds_from_hazard(hazard: float, recovery: float) -> float:
    if not 0 <= recovery < 1:
        raise ValidationError("recovery", f"must be in [0, 1), got {recovery}")
    return hazard * (1.0 - recovery) * BPS


@dataclass(frozen=True)
class CreditParams:
    """Hazard, recovery and CDS spread linked by hazard = spread / (1 - R)."""

    recovery: float
    hazard: float
    cds_spread: float

    def __post_init__(self):
        if not 0 <= self.recovery < 1:
            raise ValidationError("recovery", f"must be in [0, 1), got {self.recovery}")
        if self.hazard < 0:
            raise ValidationError("hazard", f"must be >= 0, got {self.hazard}")
        if not np.isclose(self.hazard, hazard_from_cds(self.cds_spread, self.recovery), rtol=1e-12, atol=1e-15):
            raise ValidationError("cds_spread", "inconsistent with hazard and recovery")

    @classmethod
    def from_cds(cls, spread_bps: float, recovery: float) -> "CreditParams":
        return cls(recovery=recovery, hazard=hazard_from_cds(spread_bps, recovery), cds_spread=spread_bps)

    @classmethod
    def from_hazard(cls, hazard: float, recovery: float) -> "CreditParams":
        return cls(recovery=recovery, hazard=hazard, cds_spread=cds_from_hazard(hazard, recovery))


def stranded_spread_multiplier(base_recovery: float, stranded_recovery: float, p_stranded: float) -> float:
    """Factor on the financing spread when the asset may be stranded, hazard unchanged."""
    for name, value in (("base_recovery", base_recovery), ("stranded_recovery", stranded_recovery)):
        if not 0 <= value < 1:
            raise ValidationError(name, f"must be in [0, 1), got {value}")
    if not 0 <= p_stranded <= 1:
        raise ValidationError("p_stranded", f"must be in [0, 1], got {p_stranded}")
    effective = (1 - p_stranded) * base_recovery + p_stranded * stranded_recovery
    return (1 - effective) / (1 - base_recovery)


def stranding_date(
    case: TechnologyCase,
    profile: EmissionProfile,
    prices: PriceCurve,
    revenue_usd_per_mwh: float,
    cost_share: float = 1.0,
) -> Optional[date]:
    """First operating anniversary where a year's carbon cost exceeds ``cost_share`` of revenue.

    Returns None when the plant stays viable over its operating life or the
    price curve horizon.
    """
    operate = profile.phase("operate")
    if operate is None or operate.rate == 0:
        return None
    revenue = case.size * case.capacity_factor * HOURS_PER_YEAR * revenue_usd_per_mwh
    threshold = cost_share * revenue
    year_starts: Sequence[date] = (operate.start,) + annual_schedule(operate.start, operate.end)[:-1]
    for start in year_starts:
        end = min(start + relativedelta(years=1), operate.end)
        if decimal_year(end) > prices.horizon_t:
            break
        x = DateGrid.spanning(start, end).times()
        mid = 0.5 * (x[:-1] + x[1:])
        cost = float(np.sum(prices.price_t(mid) * np.diff(profile.cumulative_t(x))))
        if cost > threshold:
            logger.debug("case %s strands on %s (carbon cost %.0f > %.0f)", case.case_id, start, cost, threshold)
            return start
    return None
