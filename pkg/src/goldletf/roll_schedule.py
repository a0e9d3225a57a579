"""COMEX-style gold futures calendar, roll schedules and spliced continuous series.

Contract listing at any trading date (month index ``m`` of that date):

* the current calendar month and the next two;
* every February, April, August and October within the next 23 months;
* every June and December within the next 72 months.

A contract stops trading on the third-to-last business day of its delivery
month. Business days are Mon-Fri; exchange holidays are not modelled.

Tenors are counted in calendar months including the current one, so in
January 2012 the Dec-12 contract is the 12-month contract and in February it
is the 11-month contract.
"""

import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .market_data import PriceSeries, TradingCalendar

MONTH_CODES = "FGHJKMNQUVXZ"
MONTH_ABBR = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
BIMONTHLY_MONTHS = frozenset({2, 4, 8, 10})
SEMIANNUAL_MONTHS = frozenset({6, 12})
FRONT_MONTHS = 3
BIMONTHLY_HORIZON = 23
SEMIANNUAL_HORIZON = 72

SUPPORTED_TENORS = (1, 2, 6, 12)
# nominal tenor -> (calendar-month count picked at a roll, lowest count held before rolling)
_TENOR_RULES = {1: (2, 2), 2: (3, 2), 6: (6, 5), 12: (12, 11)}


class ScheduleCoverageError(ValueError):
    pass


def _month_index(year, month):
    return year * 12 + (month - 1)


def _date_month_index(d):
    d = np.datetime64(d, "M").astype(int)
    return int(d) + 1970 * 12


def expiry_date(year, month):
    """Third-to-last Mon-Fri business day of the delivery month."""
    start = np.datetime64(f"{year:04d}-{month:02d}", "M").astype("datetime64[D]")
    end = (np.datetime64(f"{year:04d}-{month:02d}", "M") + 1).astype("datetime64[D]")
    days = np.arange(start, end, dtype="datetime64[D]")
    bdays = days[np.is_busday(days)]
    return bdays[-3]


@dataclass(frozen=True, order=True)
class ContractId:
    year: int
    month: int

    @property
    def index(self):
        return _month_index(self.year, self.month)

    @classmethod
    def from_index(cls, idx):
        return cls(idx // 12, idx % 12 + 1)

    @classmethod
    def parse(cls, text):
        """Accept ``2012-12``, ``Dec-12``, ``Dec12`` or ``GCZ12``."""
        text = text.strip()
        m = re.fullmatch(r"(\d{4})-(\d{2})", text)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        m = re.fullmatch(r"([A-Za-z]{3})-?(\d{2})", text)
        if m and m.group(1).title() in MONTH_ABBR:
            return cls(2000 + int(m.group(2)), MONTH_ABBR.index(m.group(1).title()) + 1)
        m = re.fullmatch(r"(?:GC)?([FGHJKMNQUVXZ])(\d{2})", text)
        if m:
            return cls(2000 + int(m.group(2)), MONTH_CODES.index(m.group(1)) + 1)
        raise ValueError(f"unrecognised contract identifier {text!r}")

    @property
    def expiry(self):
        return expiry_date(self.year, self.month)

    @property
    def label(self):
        return f"{MONTH_ABBR[self.month - 1]}-{self.year % 100:02d}"

    def __str__(self):
        return f"{self.year:04d}-{self.month:02d}"

    def months_count(self, d):
        """Calendar-month count from ``d``'s month to delivery, inclusive."""
        return self.index - _date_month_index(d) + 1


@dataclass(frozen=True)
class FuturesContract:
    """One delivery month with its expiry and, optionally, settlement prices."""

    contract: ContractId
    prices: PriceSeries = None

    def __post_init__(self):
        if self.prices is not None and self.prices.dates[-1] > self.expiry:
            raise ValueError(f"{self.contract.label}: prices extend past expiry {self.expiry}")

    @property
    def expiry(self):
        return self.contract.expiry


def is_listed(contract, d):
    """True if ``contract`` is tradable on date ``d`` under the listing rules."""
    d = np.datetime64(d, "D")
    offset = contract.index - _date_month_index(d)
    if offset < 0 or d > contract.expiry:
        return False
    if offset < FRONT_MONTHS:
        return True
    if contract.month in BIMONTHLY_MONTHS and offset <= BIMONTHLY_HORIZON:
        return True
    return contract.month in SEMIANNUAL_MONTHS and offset <= SEMIANNUAL_HORIZON


def listed_contracts(d):
    """Contracts available for trading on ``d``, nearest first."""
    base = _date_month_index(d)
    out = []
    for idx in range(base, base + SEMIANNUAL_HORIZON + 1):
        c = ContractId.from_index(idx)
        if is_listed(c, d):
            out.append(c)
    return out


def contract_calendar(start, end):
    """Every contract listed on at least one business day in ``[start, end]``."""
    start, end = np.datetime64(start, "D"), np.datetime64(end, "D")
    if not start < end:
        raise ValueError("start must precede end")
    found = set()
    # listing only changes at month boundaries and expiries; sampling each month's
    # first day and the range start covers every contract that ever becomes listed
    probes = {start}
    month = np.datetime64(start, "M") + 1
    while month.astype("datetime64[D]") <= end:
        probes.add(month.astype("datetime64[D]"))
        month += 1
    for d in sorted(probes):
        found.update(listed_contracts(d))
    return [FuturesContract(c) for c in sorted(found)]


@dataclass(frozen=True)
class RollSchedule:
    """Active contract per trading day for one nominal tenor."""

    tenor: int
    dates: np.ndarray
    contracts: tuple
    roll_flags: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.contracts)

    @property
    def roll_dates(self):
        return self.dates[self.roll_flags]

    def active(self, d):
        i = int(np.searchsorted(self.dates, np.datetime64(d, "D")))
        if i >= self.dates.size or self.dates[i] != np.datetime64(d, "D"):
            raise KeyError(f"{d} is not in the schedule")
        return self.contracts[i]

    def actual_tenors(self):
        return np.array([c.months_count(d) for c, d in zip(self.contracts, self.dates)])

    def to_frame(self):
        return pd.DataFrame({
            "date": [str(d) for d in self.dates],
            "contract": [str(c) for c in self.contracts],
            "roll_flag": self.roll_flags.astype(int),
        })


def _pick(d, target, floor, available):
    best = None
    for c in listed_contracts(d):
        count = c.months_count(d)
        if floor <= count <= target and (available is None or c in available):
            best = c
    if best is None:
        raise ScheduleCoverageError(
            f"no contract with a {floor}-{target} month count listed"
            f"{' and priced' if available is not None else ''} on {d}")
    return best


def build_schedule(tenor, calendar, available=None):
    """Assign the active contract for nominal ``tenor`` on every trading day.

    Tenors 1 and 2 hold the contract ``tenor`` months beyond the current one
    and roll on the first trading day of its delivery month. Tenors 6 and 12
    pick the listed contract nearest to, but not beyond, the nominal count,
    hold it while it ages one month and roll when it would age a second.

    Parameters
    ----------
    tenor : {1, 2, 6, 12}
    calendar : TradingCalendar or array of dates
    available : iterable of ContractId, optional
        Contracts with price data. When given, any roll that would need a
        contract outside this set raises :class:`ScheduleCoverageError`.
    """
    if tenor not in _TENOR_RULES:
        raise ValueError(f"tenor must be one of {SUPPORTED_TENORS}, got {tenor!r}")
    target, floor = _TENOR_RULES[tenor]
    if not isinstance(calendar, TradingCalendar):
        calendar = TradingCalendar(calendar)
    if available is not None:
        available = {c.contract if isinstance(c, FuturesContract) else c for c in available}

    contracts, flags = [], []
    active = None
    for d in calendar.dates:
        if active is None:
            active = _pick(d, target, floor, available)
            flags.append(False)
        elif active.months_count(d) < floor:
            active = _pick(d, target, floor, available)
            flags.append(True)
        else:
            flags.append(False)
        contracts.append(active)
    return RollSchedule(tenor, calendar.dates, tuple(contracts), np.array(flags, dtype=bool))


def continuous_series(schedule, contracts, name=None):
    """Ratio-splice the scheduled contracts into one return-preserving series.

    The return into a roll date is taken from the outgoing contract; from
    the roll date on, the incoming contract's returns drive the level.
    """
    by_id = {}
    for fc in contracts:
        if fc.prices is None:
            raise ValueError(f"{fc.contract.label} has no prices")
        by_id[fc.contract] = fc.prices

    def price(c, d, i):
        ps = by_id.get(c)
        if ps is None:
            raise ScheduleCoverageError(f"no prices for scheduled contract {c.label}")
        k = int(np.searchsorted(ps.dates, d))
        if k >= ps.dates.size or ps.dates[k] != d:
            kind = "roll date" if schedule.roll_flags[i] else "date"
            raise ScheduleCoverageError(f"{c.label} has no price on {kind} {d}")
        return ps.values[k]

    dates = schedule.dates
    values = np.empty(dates.size)
    values[0] = price(schedule.contracts[0], dates[0], 0)
    for i in range(1, dates.size):
        # outgoing contract on roll days is the one active yesterday
        c = schedule.contracts[i - 1]
        values[i] = values[i - 1] * price(c, dates[i], i) / price(c, dates[i - 1], i - 1)
    return PriceSeries(dates, values, name or f"futures_{schedule.tenor}m")
