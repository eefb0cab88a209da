"""Operating-emissions sanity check section."""

from config import SanityConfig
from domain import TechnologyCase
from emissions import operating_emissions_check

SANITY_COLUMNS = [
    "case",
    "size_mw",
    "capacity_factor",
    "emission_factor_t_per_mwh",
    "computed_mt_per_year",
    "table_mt_per_year",
    "relative_difference",
    "verdict",
]


def get_sanity_row(sanity: SanityConfig, reference: TechnologyCase) -> list[str]:
    """Recompute operating emissions and compare with the reference case."""
    computed = operating_emissions_check(sanity.size_mw, sanity.capacity_factor, sanity.emission_factor)
    table = reference.carbon_per_year
    difference = abs(computed - table) / table if table else float("inf")
    verdict = "pass" if difference <= sanity.band else "fail"
    return [
        reference.case_id,
        f"{sanity.size_mw:g}",
        f"{sanity.capacity_factor:g}",
        f"{sanity.emission_factor:g}",
        f"{computed:.2f}",
        f"{table:.2f}",
        f"{difference:.3f}",
        verdict,
    ]
