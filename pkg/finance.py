"""Discounted cash flows and the financial indicators: LCOE, NPV, IRR, payback."""
import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect

import model
from errors import (ConfigurationError, DomainError, NoPaybackError, UndefinedMetricError, require_finite,
                    require_whole)
from model import Pathway, PlantSpec

logger = logging.getLogger(__name__)

CURRENCY = "USD (constant 2024)"

IRR_LOWER = -0.99
IRR_UPPER = 10.0
# Dense near zero where project returns live, coarse up to the upper bound
IRR_GRID = np.unique(np.concatenate([
    np.linspace(IRR_LOWER, 1.0, 400),
    np.linspace(1.0, IRR_UPPER, 181),
]))


class Escalation(str, Enum):
    NONE = "none"
    INFLATION_INDEXED = "inflation-indexed"


@dataclass(frozen=True)
class FinancialAssumptions:
    discount_rate: float = 0.06  # real
    inflation_rate: float = 0.02
    lifetime: int = 25
    energy_tariff: Optional[float] = None  # USD/MWh

    def __post_init__(self):
        for name in ('discount_rate', 'inflation_rate', 'energy_tariff'):
            require_finite(name, getattr(self, name))
        object.__setattr__(self, 'lifetime', require_whole('lifetime', self.lifetime))
        if self.discount_rate <= -1:
            raise ConfigurationError('discount_rate', 'must be > -1')
        if self.lifetime < 1:
            raise ConfigurationError('lifetime', 'must be >= 1')
        if self.energy_tariff is not None and self.energy_tariff < 0:
            raise ConfigurationError('energy_tariff', 'must be >= 0')


@dataclass(frozen=True)
class CostModel:
    capex_schedule: Tuple[Tuple[int, float], ...] = ((0, 0.0),)
    opex: float = 0.0  # USD/yr
    fuel_cost: float = 0.0  # USD/yr
    opex_escalation: Escalation = Escalation.NONE
    drilling_cost_per_m: float = 0.0  # USD per metre of GSHP borehole, added to year-0 capex

    def __post_init__(self):
        schedule = []
        for entry in self.capex_schedule:
            try:
                year, amount = entry
            except (TypeError, ValueError):
                raise ConfigurationError('capex_schedule', f'entry {entry!r} must be a [year, amount] pair')
            year = require_whole('capex_schedule', year)
            amount = float(require_finite('capex_schedule', amount))
            if year < 0:
                raise ConfigurationError('capex_schedule', f'year {year} must be >= 0')
            if amount < 0:
                raise ConfigurationError('capex_schedule', f'amount {amount} in year {year} must be >= 0')
            schedule.append((year, amount))
        object.__setattr__(self, 'capex_schedule', tuple(schedule))
        if not isinstance(self.opex_escalation, Escalation):
            try:
                object.__setattr__(self, 'opex_escalation', Escalation(self.opex_escalation))
            except ValueError:
                raise ConfigurationError('opex_escalation', f"unknown escalation {self.opex_escalation!r}")
        for name in ('opex', 'fuel_cost', 'drilling_cost_per_m'):
            if require_finite(name, getattr(self, name)) < 0:
                raise ConfigurationError(name, 'must be >= 0')

    @classmethod
    def single(cls, capex, opex, fuel_cost=0.0, opex_escalation=Escalation.NONE, drilling_cost_per_m=0.0):
        return cls(((0, capex),), opex, fuel_cost, opex_escalation, drilling_cost_per_m)

    @property
    def capex(self):
        return sum(amount for _, amount in self.capex_schedule)

    def with_capex(self, total):
        """Rescale the schedule so it sums to `total`, keeping its shape."""
        current = self.capex
        if current == 0:
            schedule = ((0, total),)
        else:
            schedule = tuple((year, amount * total / current) for year, amount in self.capex_schedule)
        return dataclasses.replace(self, capex_schedule=schedule)

    def with_drilling(self, plant: PlantSpec) -> 'CostModel':
        """Borehole drilling folded into year-0 capex for the plant's borehole field."""
        if self.drilling_cost_per_m == 0:
            return self
        if plant.peak_cooling_load is None:
            raise ConfigurationError('costs.drilling_cost_per_m', 'needs plant.peak_cooling_load to size the boreholes')
        drilling = self.drilling_cost_per_m * model.borehole_length(plant.peak_cooling_load, plant.extraction_rate)
        schedule = list(self.capex_schedule)
        for k, (year, amount) in enumerate(schedule):
            if year == 0:
                schedule[k] = (0, amount + drilling)
                break
        else:
            schedule.insert(0, (0, drilling))
        return dataclasses.replace(self, capex_schedule=tuple(schedule), drilling_cost_per_m=0.0)


@dataclass(frozen=True, eq=False)
class CashFlowSeries:
    year: np.ndarray
    investment: np.ndarray
    om: np.ndarray
    fuel: np.ndarray
    energy: np.ndarray
    revenue: np.ndarray
    has_revenue: bool = True
    start_year: int = 1

    @property
    def net(self):
        return self.revenue - self.investment - self.om - self.fuel

    @property
    def lifetime(self):
        return len(self.year) - 1

    def __len__(self):
        return len(self.year)

    @classmethod
    def from_net_flows(cls, flows, start_year=1):
        """Series carrying only net flows: outflows as investment, inflows as revenue."""
        flows = np.asarray(flows, dtype=float)
        zeros = np.zeros_like(flows)
        return cls(
            year=np.arange(len(flows)),
            investment=np.where(flows < 0, -flows, 0.0),
            om=zeros,
            fuel=zeros.copy(),
            energy=zeros.copy(),
            revenue=np.where(flows > 0, flows, 0.0),
            start_year=start_year,
        )

    def to_frame(self):
        return pd.DataFrame({
            'year': self.year,
            'investment': self.investment,
            'om': self.om,
            'fuel': self.fuel,
            'energy_mwh': self.energy,
            'revenue': self.revenue,
            'net': self.net,
        })


@dataclass
class MetricsReport:
    lcoe: Optional[float] = None
    npv: Optional[float] = None
    irr: Optional[float] = None
    irr_ambiguous: bool = False
    payback_simple: Optional[float] = None
    payback_cumulative: Optional[float] = None
    undefined: dict = field(default_factory=dict)


def discount_factors(discount_rate, lifetime):
    if discount_rate <= -1:
        raise DomainError(f"discount_rate must be > -1, got {discount_rate}")
    return (1.0 + discount_rate) ** -np.arange(lifetime + 1, dtype=float)


def build_cash_flows(plant: PlantSpec, costs: CostModel, assumptions: FinancialAssumptions,
                     annual_energy: Optional[float] = None) -> CashFlowSeries:
    """Assemble yearly I_t, M_t, F_t, E_t and revenue for t = 0..n."""
    costs = costs.with_drilling(plant)
    n = assumptions.lifetime
    if plant.lifetime != n:
        raise ConfigurationError('plant.lifetime', f'must equal assumptions.lifetime ({n})')
    if annual_energy is None:
        basis = plant.utilization if plant.pathway is Pathway.GSHP else plant.capacity_factor
        annual_energy = model.annual_energy(plant.rated_capacity, basis)
    if annual_energy < 0:
        raise DomainError(f"annual energy must be >= 0, got {annual_energy}")

    years = np.arange(n + 1)
    investment = np.zeros(n + 1)
    for year, amount in costs.capex_schedule:
        if year > n:
            raise ConfigurationError('costs.capex_schedule', f'year {year} beyond lifetime {n}')
        investment[year] += amount

    operating = years >= plant.generation_start_year
    if costs.opex_escalation is Escalation.INFLATION_INDEXED:
        om = costs.opex * (1.0 + assumptions.inflation_rate) ** years
    else:
        om = np.full(n + 1, costs.opex, dtype=float)
    om = np.where(operating, om, 0.0)
    fuel = np.where(operating, costs.fuel_cost, 0.0)
    energy = np.where(operating, annual_energy, 0.0)

    has_revenue = assumptions.energy_tariff is not None
    revenue = assumptions.energy_tariff * energy if has_revenue else np.zeros(n + 1)

    return CashFlowSeries(years, investment, om, fuel, energy, revenue,
                          has_revenue=has_revenue, start_year=plant.generation_start_year)


def lcoe(series: CashFlowSeries, discount_rate: float) -> float:
    """Discounted costs over discounted energy; year-0 investment is undiscounted."""
    factors = discount_factors(discount_rate, series.lifetime)
    discounted_energy = float(np.sum(series.energy * factors))
    if discounted_energy <= 0:
        raise UndefinedMetricError("LCOE undefined: discounted energy is zero")
    costs = series.investment + series.om + series.fuel
    return float(np.sum(costs * factors)) / discounted_energy


def npv(series: CashFlowSeries, discount_rate: float) -> float:
    if not series.has_revenue:
        raise UndefinedMetricError("NPV undefined: no energy tariff, revenue unknown")
    factors = discount_factors(discount_rate, series.lifetime)
    return float(np.sum(series.net * factors))


def _npv_of_flows(flows, rate):
    return float(np.sum(flows * (1.0 + rate) ** -np.arange(len(flows), dtype=float)))


def irr_roots(series: CashFlowSeries):
    """All NPV roots bracketed on (-0.99, 10], ascending."""
    flows = series.net
    if not (np.any(flows < 0) and np.any(flows > 0)):
        return []

    t = np.arange(len(flows), dtype=float)
    values = np.sum(flows[None, :] * (1.0 + IRR_GRID[:, None]) ** -t[None, :], axis=1)
    roots = []
    for k in range(len(IRR_GRID) - 1):
        lo, hi = IRR_GRID[k], IRR_GRID[k + 1]
        if values[k] == 0:
            roots.append(float(lo))
        elif values[k] * values[k + 1] < 0:
            roots.append(bisect(lambda r: _npv_of_flows(flows, r), lo, hi, xtol=1e-15, maxiter=500))
    if values[-1] == 0:
        roots.append(float(IRR_GRID[-1]))
    return roots


def irr(series: CashFlowSeries) -> Optional[float]:
    roots = irr_roots(series)
    if not roots:
        return None
    if len(roots) > 1:
        logger.warning(f"Multiple IRRs {[round(r, 6) for r in roots]}; reporting the smallest")
    return roots[0]


def payback_simple(initial_investment: float, annual_net_inflow: float) -> float:
    """Initial investment over a constant annual net inflow."""
    if annual_net_inflow <= 0:
        raise NoPaybackError(f"no payback: annual net inflow is {annual_net_inflow}")
    return initial_investment / annual_net_inflow


def payback_cumulative(series: CashFlowSeries) -> Optional[float]:
    """Years from the first investment until the running net cash flow is back at zero.

    The clock starts in the year the running sum first goes negative, so a
    construction year with no flows ahead of the investment does not count as
    an instant payback; recovery is interpolated within the year. A series
    that never goes negative pays back at 0.
    """
    if not series.has_revenue:
        raise UndefinedMetricError("payback undefined: no energy tariff, revenue unknown")
    net = series.net
    cumulative = np.cumsum(net)
    negative = np.flatnonzero(cumulative < 0)
    if negative.size == 0:
        return 0.0
    first = int(negative[0])
    for t in range(first + 1, len(net)):
        if cumulative[t] >= 0:
            return (t - 1 - first) + (-cumulative[t - 1]) / net[t]
    return None


def compute_metrics(series: CashFlowSeries, assumptions: FinancialAssumptions) -> MetricsReport:
    """All indicators for one series; failures are recorded per metric."""
    report = MetricsReport()
    r = assumptions.discount_rate

    try:
        report.lcoe = lcoe(series, r)
    except UndefinedMetricError as e:
        report.undefined['lcoe'] = str(e)

    if not series.has_revenue:
        reason = "no energy tariff"
        for metric in ('npv', 'irr', 'payback_simple', 'payback_cumulative'):
            report.undefined[metric] = reason
        return report

    report.npv = npv(series, r)
    roots = irr_roots(series)
    if roots:
        report.irr = roots[0]
        report.irr_ambiguous = len(roots) > 1
    else:
        report.undefined['irr'] = "no sign change in NPV on the search bracket"

    alpha = series.start_year
    inflow = series.revenue[alpha] - series.om[alpha] - series.fuel[alpha]
    try:
        report.payback_simple = payback_simple(float(np.sum(series.investment)), float(inflow))
    except NoPaybackError as e:
        report.undefined['payback_simple'] = str(e)

    report.payback_cumulative = payback_cumulative(series)
    if report.payback_cumulative is None:
        report.undefined['payback_cumulative'] = "cumulative net cash flow never recovers"
    return report
