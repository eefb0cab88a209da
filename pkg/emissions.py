"""Dated carbon emission profiles over the plan/build/operate/deconstruct phases."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date
from typing import Optional

import numpy as np

from constants import HOURS_PER_YEAR, TONNES_PER_MT
from domain import TechnologyCase, add_months, decimal_year, validate_technology
from errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmissionSegment:
    """Constant emission rate (tCO2e/yr) over [start, end)."""

    start: date
    end: date
    rate: float
    phase: str

    @property
    def start_t(self) -> float:
        return decimal_year(self.start)

    @property
    def end_t(self) -> float:
        return decimal_year(self.end)

    @property
    def tonnes(self) -> float:
        return self.rate * (self.end_t - self.start_t)


@dataclass(frozen=True)
class EmissionProfile:
    """Contiguous piecewise-constant emission segments for one case."""

    case_id: str
    segments: tuple[EmissionSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("segments", f"case {self.case_id} has an empty profile")
        for seg in self.segments:
            if seg.rate < 0:
                raise ValidationError("rate", f"negative rate in {seg.phase} phase of case {self.case_id}")
            if seg.end <= seg.start:
                raise ValidationError("segments", f"empty {seg.phase} segment in case {self.case_id}")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.end != b.start:
                raise ValidationError("segments", f"{a.phase} and {b.phase} are not contiguous in case {self.case_id}")
        edges = np.array([self.segments[0].start_t] + [s.end_t for s in self.segments])
        cumulative = np.concatenate([[0.0], np.cumsum([s.tonnes for s in self.segments])])
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_cumulative", cumulative)
        object.__setattr__(self, "_rates", np.array([s.rate for s in self.segments]))

    @property
    def start(self) -> date:
        return self.segments[0].start

    @property
    def end(self) -> date:
        return self.segments[-1].end

    @property
    def phases(self) -> tuple[str, ...]:
        return tuple(s.phase for s in self.segments)

    def phase(self, label: str) -> Optional[EmissionSegment]:
        for seg in self.segments:
            if seg.phase == label:
                return seg
        return None

    def cumulative_t(self, x):
        """Tonnes emitted from profile start up to time x (flat outside)."""
        values = np.interp(np.asarray(x, dtype=float), self._edges, self._cumulative)
        return float(values) if np.ndim(values) == 0 else values

    def rate_t(self, x):
        """Rate in t/yr at time x, right-continuous; 0 outside the profile."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._edges, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self._rates))
        values = np.where(inside, self._rates[np.clip(idx, 0, len(self._rates) - 1)], 0.0)
        return float(values) if np.ndim(values) == 0 else values


def build_profile(case: TechnologyCase, as_of: date) -> EmissionProfile:
    """Lay the four project phases end to end from ``as_of``.

    No carbon is emitted while planning. Build and deconstruct carbon are
    spread uniformly over their phases; the operate rate is ``carbon_per_year``.
    Zero-length phases are left out.
    """
    validate_technology(case)
    months = {
        "plan": case.develop,
        "build": case.build,
        "operate": case.lifespan * 12,
        "deconstruct": case.deconstruct_months,
    }
    totals = {"build": case.carbon_to_build, "deconstruct": case.deconstruct_carbon}

    segments = []
    elapsed = 0.0
    start = as_of
    for phase, length in months.items():
        if length <= 0:
            continue
        elapsed += length
        end = add_months(as_of, elapsed)
        span = decimal_year(end) - decimal_year(start)
        if phase == "operate":
            rate = case.carbon_per_year * TONNES_PER_MT
        elif phase in totals:
            rate = totals[phase] * TONNES_PER_MT / span
        else:
            rate = 0.0
        segments.append(EmissionSegment(start=start, end=end, rate=rate, phase=phase))
        start = end
    logger.debug("case %s: profile %s to %s", case.case_id, as_of, start)
    return EmissionProfile(case_id=case.case_id, segments=tuple(segments))


def total_emissions(profile: EmissionProfile, t0: date, t1: date) -> float:
    """Exact tonnes CO2e emitted in [t0, t1]."""
    if t1 < t0:
        raise ValidationError("t1", f"interval is reversed: {t0} > {t1}")
    return profile.cumulative_t(decimal_year(t1)) - profile.cumulative_t(decimal_year(t0))


def operating_emissions_check(size: float, capacity_factor: float, emission_factor: float) -> float:
    """Operating emissions in MT/yr from plant size (MW) and t/MWh factor."""
    for name, value in (("size", size), ("capacity_factor", capacity_factor), ("emission_factor", emission_factor)):
        if value < 0:
            raise ValidationError(name, f"must be >= 0, got {value}")
    return size * capacity_factor * HOURS_PER_YEAR * emission_factor / TONNES_PER_MT
