"""Constants and calculation defaults for CEP project-finance pricing."""

from datetime import date

# Calculation date and project start
AS_OF = date(2021, 11, 30)

# Termsheet JSON schema version
CEP_VERSION = "1.0"

# Pseudo-currency for tonnes of CO2-equivalent
XCE = "XCE"
USD = "USD"

# Unit conversions
TONNES_PER_MT = 1_000_000.0
USD_PER_BUSD = 1_000_000_000.0
HOURS_PER_YEAR = 8760.0
BPS = 10_000.0

# Risky funding = riskless + flat BBB spread (5y SOFR vs BBB)
BBB_SPREAD_BPS = 157.0

# Scenario series are quoted in 2010 USD, NET costs in 2011 USD
SCENARIO_BASE_YEAR = 2010
NET_BASE_YEAR = 2011

# NET availability and emergent-technology cost multipliers
NET_EMERGENT_YEAR = 2030
NET_MULTIPLIERS = {
    "low": 6.0,
    "high": 3.0,
    "mid": 4.5,
}

# Permanence: 100 years from the sequestration date
PERMANENCE_YEARS = 100.0
PHYSICAL_HAZARD = 0.01  # share of US forest burnt per year
FINANCIAL_SPREAD_BPS = 250.0  # BBB certificate issuer, hazard = spread / (1 - R)
SEQUESTRATION_RECOVERY = 0.4

# Senior unsecured power-plant recovery: 69% + 4.5% restructuring adjustment
PROJECT_FINANCE_RECOVERY = 0.735

# Deconstruction: half the build time; carbon as a share of build carbon
DECONSTRUCT_TIME_SHARE = 0.5
DECONSTRUCT_CARBON_SHARE = 0.5

# Built-in scenario names and their report labels
SCENARIO_LABELS = {
    "DelayedTransition": "Delayed transition",
    "Forest": "Forest",
    "NDC": "NDCs",
    "NetZero2050": "net-zero 2050",
}
FOREST_SCENARIO = "Forest"

# Financing maturities (years, or to end of operation)
MATURITY_ALL = "All"
DEFAULT_MATURITIES = (10, 20, 30, MATURITY_ALL)

# Report markers
NA_MARKER = "NA"
