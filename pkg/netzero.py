"""NET capacity that makes a financing financially net-zero.

A constant capacity v (MT/yr) of negative-emissions technology earns the
carbon price less the NET cost on every tonne it captures. The financing is
net-zero when the value of those profits equals the carbon cost NPV.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date
from typing import Optional

import numpy as np

from constants import TONNES_PER_MT
from curves import DiscountCurve, PriceCurve
from domain import DateGrid
from errors import NoSolutionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetZeroSolution:
    """Required capacity in MT/yr, or None when profits are zero throughout."""

    capacity: Optional[float]
    profit_integral: float
    target_npv: float

    @property
    def solved(self) -> bool:
        return self.capacity is not None


def _cost_t(net_cost, x):
    if hasattr(net_cost, "cost_t"):
        return net_cost.cost_t(x)
    return net_cost.price_t(x)


def profit_integral(
    prices: PriceCurve,
    net_cost,
    curve: DiscountCurve,
    t0: date,
    T: date,
    discounted: bool = True,
) -> float:
    """USD earned over [t0, T] per MT/yr of NET capacity.

    Times where the NET cost is undefined earn nothing.
    """
    if T < t0:
        raise ValidationError("T", f"{T} is before {t0}")
    if T == t0:
        return 0.0
    x = DateGrid.spanning(t0, T).times()
    mid = 0.5 * (x[:-1] + x[1:])
    margin = np.asarray(prices.price_t(mid)) - np.asarray(_cost_t(net_cost, mid))
    margin = np.where(np.isnan(margin), 0.0, np.maximum(margin, 0.0))
    weights = curve.discount_t(mid) if discounted else 1.0
    return float(np.sum(weights * margin * np.diff(x))) * TONNES_PER_MT


def required_net_capacity(
    carbon_npv: float,
    prices: PriceCurve,
    net_cost,
    curve: DiscountCurve,
    t0: date,
    T: date,
    discounted: bool = True,
) -> NetZeroSolution:
    """Solve capacity * profit_integral = carbon_npv for a constant capacity."""
    if carbon_npv < 0:
        raise ValidationError("carbon_npv", f"must be >= 0, got {carbon_npv}")
    profit = profit_integral(prices, net_cost, curve, t0, T, discounted=discounted)
    if profit == 0:
        logger.debug("no NET profit between %s and %s", t0, T)
        return NetZeroSolution(capacity=None, profit_integral=0.0, target_npv=carbon_npv)
    return NetZeroSolution(capacity=carbon_npv / profit, profit_integral=profit, target_npv=carbon_npv)


def verify_net_zero(solution: NetZeroSolution, carbon_npv: Optional[float] = None) -> float:
    """Absolute residual |capacity * profit_integral - carbon_npv| in USD."""
    if not solution.solved:
        raise NoSolutionError(f"no NET capacity reaches net-zero for NPV {solution.target_npv:.0f}")
    target = solution.target_npv if carbon_npv is None else carbon_npv
    return abs(solution.capacity * solution.profit_integral - target)
