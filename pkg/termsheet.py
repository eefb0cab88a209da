"""Linked cash/XCE termsheets and their lifecycle event schedules.

Part 1 is a fixed-rate bond between financier A and project B. Part 2 holds
the dated XCE flows the financing enables. While the bond is outstanding the
carbon liability sits with the financier and it returns to the project at
redemption.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from datetime import date
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Any, Optional, Sequence

from dateutil.relativedelta import relativedelta

from constants import BPS, CEP_VERSION, USD, USD_PER_BUSD, XCE
from domain import Money, TechnologyCase, decimal_year
from emissions import EmissionProfile, build_profile
from errors import TermsheetError, ValidationError
from pricing import DayCount, annual_schedule

logger = logging.getLogger(__name__)


class Direction(str, enum.Enum):
    """Cash direction seen from project B."""

    RECEIVE = "receive"
    PAY = "pay"


class EventKind(str, enum.Enum):
    NOTIONAL_EXCHANGE = "notional_exchange"
    COUPON = "coupon"
    XCE_ACCRUAL = "xce_accrual"
    REDEMPTION = "redemption"
    LIABILITY_RETURN = "liability_return"

    @property
    def order(self) -> int:
        return list(EventKind).index(self)


@dataclass(frozen=True)
class CashFlow:
    date: date
    amount: Money
    direction: Direction
    kind: EventKind
    description: str = ""


@dataclass(frozen=True)
class XcePeriod:
    """XCE emitted at a constant rate per year over [start, end)."""

    start: date
    end: date
    rate: Money
    phase: str

    def accrued(self, t0: date, t1: date) -> Money:
        """XCE accrued over the overlap of [t0, t1] with this period."""
        lo, hi = max(t0, self.start), min(t1, self.end)
        if hi <= lo:
            return Money.of(0, XCE)
        return self.rate.scale(decimal_year(hi) - decimal_year(lo))


@dataclass(frozen=True)
class LinkedTermsheet:
    case_id: str
    issue_date: date
    maturity: date
    notional: Money
    coupon_bps: float
    cash_leg: tuple[CashFlow, ...]
    xce_leg: tuple[XcePeriod, ...]
    financier: str = "A"
    project: str = "B"
    cep_version: str = CEP_VERSION

    def xce_between(self, t0: date, t1: date) -> Money:
        total = Money.of(0, XCE)
        for period in self.xce_leg:
            total = total + period.accrued(t0, t1)
        return total

    @property
    def xce_end(self) -> Optional[date]:
        return self.xce_leg[-1].end if self.xce_leg else None


@dataclass(frozen=True)
class LifecycleEvent:
    date: date
    kind: EventKind
    amount: Money
    description: str = ""


@dataclass(frozen=True)
class XceSummary:
    """Shorthand XCE leg: one aggregated flow at issue."""

    date: date
    amount: Money


def _xce_leg(profile: EmissionProfile) -> tuple[XcePeriod, ...]:
    return tuple(XcePeriod(s.start, s.end, Money.of(s.rate, XCE), s.phase) for s in profile.segments)


CENT = Decimal("0.01")


def coupon_amount(notional: Money, coupon_bps: float, start: date, end: date) -> Money:
    """ACT/360 fixed coupon on ``notional``, rounded to cents."""
    days = Decimal((end - start).days)
    amount = notional.amount * Decimal(str(coupon_bps)) / Decimal(BPS) * days / Decimal(360)
    return Money(amount.quantize(CENT, rounding=ROUND_HALF_EVEN), notional.currency)


def generate_termsheet(
    case: TechnologyCase,
    financing_years: float,
    coupon_bps: float,
    as_of: date,
    notional_usd: Optional[float] = None,
    profile: Optional[EmissionProfile] = None,
) -> LinkedTermsheet:
    """Build the linked termsheet for a bond financing ``case`` from ``as_of``.

    Args:
        case: Technology case being financed
        financing_years: Bond tenor in years, truncated to the end of deconstruction
        coupon_bps: Fixed annual coupon, accrued Act/360
        as_of: Issue date
        notional_usd: Bond notional (defaults to the capital cost)
        profile: Emission profile (built from ``as_of`` if omitted)

    Returns:
        LinkedTermsheet with the full emission profile as its XCE leg
    """
    if financing_years <= 0:
        raise ValidationError("financing_years", f"must be > 0, got {financing_years}")
    profile = profile or build_profile(case, as_of)
    whole = int(financing_years)
    maturity = as_of + relativedelta(years=whole, months=round((financing_years - whole) * 12))
    if maturity > profile.end:
        logger.info("case %s: maturity %s truncated to end of deconstruction %s", case.case_id, maturity, profile.end)
        maturity = profile.end
    notional = Money.of(notional_usd if notional_usd is not None else case.capital_cost * USD_PER_BUSD, USD)

    flows = [CashFlow(as_of, notional, Direction.RECEIVE, EventKind.NOTIONAL_EXCHANGE, "Party A pays Party B notional")]
    previous = as_of
    for pay_date in annual_schedule(as_of, maturity):
        flows.append(CashFlow(pay_date, coupon_amount(notional, coupon_bps, previous, pay_date), Direction.PAY, EventKind.COUPON, "coupon"))
        previous = pay_date
    flows.append(CashFlow(maturity, notional, Direction.PAY, EventKind.REDEMPTION, "Party B pays Party A notional"))

    return LinkedTermsheet(
        case_id=case.case_id,
        issue_date=as_of,
        maturity=maturity,
        notional=notional,
        coupon_bps=float(coupon_bps),
        cash_leg=tuple(flows),
        xce_leg=_xce_leg(profile),
    )


def validate_termsheet(ts: LinkedTermsheet) -> list[str]:
    """Raise on structural violations; return warnings for legal but unusual legs."""
    if ts.cep_version != CEP_VERSION:
        raise TermsheetError(f"unsupported cep_version {ts.cep_version!r}")
    if ts.maturity <= ts.issue_date:
        raise TermsheetError(f"maturity {ts.maturity} is not after issue {ts.issue_date}")
    for flow in ts.cash_leg:
        if flow.amount.currency != ts.notional.currency:
            raise TermsheetError(f"cash flow on {flow.date} is in {flow.amount.currency}")
    notionals = [f for f in ts.cash_leg if f.kind is EventKind.NOTIONAL_EXCHANGE]
    if len(notionals) != 1 or notionals[0].date != ts.issue_date:
        raise TermsheetError("cash leg needs exactly one initial notional at issue")
    redemptions = [f for f in ts.cash_leg if f.kind is EventKind.REDEMPTION]
    if len(redemptions) != 1 or redemptions[0].date != ts.maturity:
        raise TermsheetError("cash leg needs exactly one notional repayment at maturity")
    if any(b.date < a.date for a, b in zip(ts.cash_leg, ts.cash_leg[1:])):
        raise TermsheetError("cash leg is not date ordered")
    warnings = []
    for a, b in zip(ts.xce_leg, ts.xce_leg[1:]):
        if a.end != b.start:
            raise TermsheetError(f"XCE periods {a.phase} and {b.phase} are not contiguous")
    for period in ts.xce_leg:
        if not period.rate.is_carbon:
            raise TermsheetError(f"XCE period {period.phase} is in {period.rate.currency}")
        if period.rate.amount < 0:
            message = f"{period.phase} phase has negative XCE (net sequestration)"
            logger.warning("case %s: %s", ts.case_id, message)
            warnings.append(message)
    return warnings


def lifecycle_schedule(ts: LinkedTermsheet, construction_default: Optional[date] = None) -> list[LifecycleEvent]:
    """Date-ordered cash and carbon events.

    XCE accrues to each coupon date; the XCE still to be emitted after
    maturity goes back to the project with the redemption. A default during
    planning or construction ends all flows on the default date.
    """
    if construction_default is not None:
        if construction_default < ts.issue_date:
            raise TermsheetError(f"default on {construction_default} precedes issue on {ts.issue_date}")
        operate = next((p for p in ts.xce_leg if p.phase == "operate"), None)
        if operate is not None and construction_default >= operate.start:
            raise TermsheetError(f"default on {construction_default} is not in construction; loans are restructured in operation")

    events = []
    accrued_to = ts.issue_date
    for flow in ts.cash_leg:
        events.append(LifecycleEvent(flow.date, flow.kind, flow.amount, flow.description))
        if flow.kind is EventKind.COUPON and ts.xce_leg:
            events.append(LifecycleEvent(flow.date, EventKind.XCE_ACCRUAL, ts.xce_between(accrued_to, flow.date)))
            accrued_to = flow.date
        elif flow.kind is EventKind.REDEMPTION and ts.xce_leg:
            remaining = ts.xce_between(flow.date, ts.xce_end) if ts.xce_end > flow.date else Money.of(0, XCE)
            events.append(LifecycleEvent(flow.date, EventKind.LIABILITY_RETURN, remaining, "carbon liability returns to project"))

    if construction_default is not None:
        kept = [e for e in events if e.date <= construction_default and e.kind is not EventKind.LIABILITY_RETURN]
        last_accrual = max((e.date for e in kept if e.kind is EventKind.XCE_ACCRUAL), default=ts.issue_date)
        if ts.xce_leg and construction_default > last_accrual:
            kept.append(LifecycleEvent(construction_default, EventKind.XCE_ACCRUAL, ts.xce_between(last_accrual, construction_default), "default"))
        events = kept
    return sorted(events, key=lambda e: (e.date, e.kind.order))


def summarize_xce(ts: LinkedTermsheet) -> XceSummary:
    """Aggregate XCE over the financing window into one flow at issue."""
    return XceSummary(ts.issue_date, ts.xce_between(ts.issue_date, ts.maturity))


def to_json(ts: LinkedTermsheet, meta: Optional[dict] = None) -> str:
    """Serialize as a two-part document, amounts as decimal strings with currency codes."""
    document: dict[str, Any] = {"meta": meta} if meta else {}
    document.update({
        "cep_version": ts.cep_version,
        "case_id": ts.case_id,
        "parties": {"financier": ts.financier, "project": ts.project},
        "part1": {
            "type": "fixed_rate_bond",
            "issue_date": ts.issue_date.isoformat(),
            "maturity": ts.maturity.isoformat(),
            "notional": ts.notional.to_dict(),
            "coupon_bps": ts.coupon_bps,
            "daycount": DayCount.ACT_360.value,
            "flows": [
                {"date": f.date.isoformat(), "amount": f.amount.to_dict(), "direction": f.direction.value, "kind": f.kind.value, "description": f.description}
                for f in ts.cash_leg
            ],
        },
        "part2": {
            "currency": XCE,
            "periods": [
                {"start": p.start.isoformat(), "end": p.end.isoformat(), "rate_per_year": p.rate.to_dict(), "phase": p.phase}
                for p in ts.xce_leg
            ],
        },
    })
    return json.dumps(document, indent=2)


def from_json(text: str) -> LinkedTermsheet:
    try:
        document: dict[str, Any] = json.loads(text)
        if document["cep_version"] != CEP_VERSION:
            raise TermsheetError(f"unsupported cep_version {document['cep_version']!r}")
        part1, part2 = document["part1"], document["part2"]
        return LinkedTermsheet(
            case_id=document["case_id"],
            issue_date=date.fromisoformat(part1["issue_date"]),
            maturity=date.fromisoformat(part1["maturity"]),
            notional=Money.from_dict(part1["notional"]),
            coupon_bps=float(part1["coupon_bps"]),
            cash_leg=tuple(
                CashFlow(date.fromisoformat(f["date"]), Money.from_dict(f["amount"]), Direction(f["direction"]), EventKind(f["kind"]), f["description"])
                for f in part1["flows"]
            ),
            xce_leg=tuple(
                XcePeriod(date.fromisoformat(p["start"]), date.fromisoformat(p["end"]), Money.from_dict(p["rate_per_year"]), p["phase"])
                for p in part2["periods"]
            ),
            financier=document["parties"]["financier"],
            project=document["parties"]["project"],
            cep_version=document["cep_version"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TermsheetError(f"malformed termsheet document: {exc}") from exc


def events_to_rows(events: Sequence[LifecycleEvent]) -> list[dict[str, Any]]:
    return [
        {
            "date": e.date.isoformat(),
            "kind": e.kind.value,
            "amount": str(e.amount.amount),
            "currency": e.amount.currency,
            "description": e.description,
        }
        for e in events
    ]
