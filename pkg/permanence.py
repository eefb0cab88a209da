"""Cost of keeping sequestered carbon out of the atmosphere for a fixed horizon.

A certificate supplier defaults at a constant hazard; on each default the
buyer repurchases the tonne at the prevailing NET cost less the recovery.
The closed form integrates that expected cost on a monthly grid, and a
Monte-Carlo simulator checks it path by path.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date
from typing import Optional, Protocol, Sequence

import numpy as np

from constants import (
    FINANCIAL_SPREAD_BPS,
    FOREST_SCENARIO,
    PERMANENCE_YEARS,
    PHYSICAL_HAZARD,
    SEQUESTRATION_RECOVERY,
)
from curves import CarbonPriceCurve, DiscountCurve, InflationIndex
from domain import DateGrid, ScenarioId, add_months, decimal_year
from errors import UnavailableError, ValidationError
from pricing import hazard_from_cds

logger = logging.getLogger(__name__)


class CostCurve(Protocol):
    technology: str

    def cost_t(self, x): ...


@dataclass(frozen=True)
class PermanenceModel:
    """Constant default hazard, recovery, funding curve and permanence horizon."""

    hazard: float
    recovery: float
    funding_curve: DiscountCurve
    t_perm: float = PERMANENCE_YEARS

    def __post_init__(self):
        if self.hazard < 0:
            raise ValidationError("hazard", f"must be >= 0, got {self.hazard}")
        if not 0 <= self.recovery <= 1:
            raise ValidationError("recovery", f"must be in [0, 1], got {self.recovery}")
        if self.t_perm <= 0:
            raise ValidationError("t_perm", f"must be > 0, got {self.t_perm}")

    @classmethod
    def from_credit(
        cls,
        funding_curve: DiscountCurve,
        physical_hazard: float = PHYSICAL_HAZARD,
        financial_spread_bps: float = FINANCIAL_SPREAD_BPS,
        recovery: float = SEQUESTRATION_RECOVERY,
        t_perm: float = PERMANENCE_YEARS,
    ) -> "PermanenceModel":
        """Physical hazard plus the hazard implied by the issuer's credit spread."""
        hazard = physical_hazard + hazard_from_cds(financial_spread_bps, recovery)
        return cls(hazard=hazard, recovery=recovery, funding_curve=funding_curve, t_perm=t_perm)

    @property
    def loss_rate(self) -> float:
        return self.hazard * (1.0 - self.recovery)


def _cost_at(f: CostCurve, x: float) -> float:
    value = float(f.cost_t(x))
    if np.isnan(value):
        raise UnavailableError(f"{f.technology} is not available at {x:.4f}")
    return value


def pv_permanence(f: CostCurve, t: date, model: PermanenceModel) -> float:
    """Expected discounted repurchase cost per tonne sequestered at ``t``."""
    x0 = decimal_year(t)
    _cost_at(f, x0)
    if model.loss_rate == 0:
        return 0.0
    x = DateGrid(as_of=t, horizon=model.t_perm).times()
    mid = 0.5 * (x[:-1] + x[1:])
    discount = model.funding_curve.forward_discount_t(x0, mid)
    return model.loss_rate * float(np.sum(discount * f.cost_t(mid) * np.diff(x)))


def permanence_adjusted_cost(f: CostCurve, t: date, model: PermanenceModel) -> float:
    return _cost_at(f, decimal_year(t)) + pv_permanence(f, t, model)


def _simulate_batch(f: CostCurve, x0: float, span: float, model: PermanenceModel, size: int, seed: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed)
    counts = rng.poisson(model.hazard * span, size=size)
    times = x0 + span * rng.random(int(counts.sum()))
    losses = (1.0 - model.recovery) * model.funding_curve.forward_discount_t(x0, times) * f.cost_t(times)
    paths = np.repeat(np.arange(size), counts)
    return np.bincount(paths, weights=np.atleast_1d(losses), minlength=size)


def simulate_permanence_cost(
    f: CostCurve,
    t: date,
    model: PermanenceModel,
    n_paths: int,
    seed: int,
    batch_size: int = 10_000,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the permanence cost.

    Paths run in batches with independent child seeds, so the result does
    not depend on ``workers``.
    """
    if n_paths < 1:
        raise ValidationError("n_paths", f"must be >= 1, got {n_paths}")
    x0 = decimal_year(t)
    _cost_at(f, x0)
    if model.loss_rate == 0:
        return 0.0, 0.0
    span = decimal_year(add_months(t, model.t_perm * 12)) - x0
    sizes = [min(batch_size, n_paths - start) for start in range(0, n_paths, batch_size)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(job):
        size, child = job
        return _simulate_batch(f, x0, span, model, size, child)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, zip(sizes, seeds)))
    else:
        batches = [run(job) for job in zip(sizes, seeds)]
    costs = np.concatenate(batches)
    stderr = float(np.std(costs, ddof=1) / np.sqrt(n_paths)) if n_paths > 1 else 0.0
    return float(np.mean(costs)), stderr


def adjusted_cost_curve(
    curves: Sequence[CostCurve],
    model: PermanenceModel,
    as_of: date,
    horizon: date,
    index: InflationIndex,
    label: str = FOREST_SCENARIO,
) -> CarbonPriceCurve:
    """Cheapest permanence-adjusted NET cost tabulated on annual knots.

    Anniversaries where no technology is available are skipped.
    """
    knots = []
    k = 0
    while (d := add_months(as_of, 12 * k)) <= horizon:
        costs = []
        for curve in curves:
            try:
                costs.append(permanence_adjusted_cost(curve, d, model))
            except UnavailableError:
                continue
        if costs:
            knots.append((d, min(costs)))
        k += 1
    if not knots:
        raise UnavailableError(f"no NET available between {as_of} and {horizon}")
    logger.debug("%s: %d adjusted cost knots from %s", label, len(knots), knots[0][0])
    return CarbonPriceCurve(scenario=ScenarioId(label), knots=tuple(knots), index=index, horizon=horizon)


@dataclass(frozen=True)
class PermanencePoint:
    """One row of the permanence curve report."""

    date: date
    technology: str
    raw_cost: float
    add_on: float
    mc_mean: Optional[float] = None
    mc_stderr: Optional[float] = None

    @property
    def adjusted_cost(self) -> float:
        return self.raw_cost + self.add_on


def permanence_table(
    curves: Sequence[CostCurve],
    model: PermanenceModel,
    as_of: date,
    until: date,
    mc_paths: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> list[PermanencePoint]:
    """Raw cost, add-on and adjusted cost per technology on annual dates."""
    points = []
    k = 0
    while (d := add_months(as_of, 12 * k)) <= until:
        for curve in curves:
            try:
                raw = _cost_at(curve, decimal_year(d))
            except UnavailableError:
                continue
            add_on = pv_permanence(curve, d, model)
            mc_mean = mc_stderr = None
            if mc_paths > 0:
                mc_mean, mc_stderr = simulate_permanence_cost(curve, d, model, mc_paths, seed + k, workers=workers)
            points.append(PermanencePoint(d, curve.technology, raw, add_on, mc_mean, mc_stderr))
        k += 1
    return points
