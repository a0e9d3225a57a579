import datetime as dt

import numpy as np
import pytest

from goldletf.market_data import PriceSeries, TradingCalendar
from goldletf.roll_schedule import (ContractId, FuturesContract, ScheduleCoverageError, build_schedule,
                                    continuous_series, contract_calendar, expiry_date, is_listed,
                                    listed_contracts)


def _brute_listed(day):
    """Listing rules evaluated directly from the exchange description."""
    out = []
    for ahead in range(0, 73):
        y, m = divmod(day.month - 1 + ahead, 12)
        y += day.year
        m += 1
        ok = ahead <= 2 or (m in (2, 4, 8, 10) and ahead <= 23) or (m in (6, 12) and ahead <= 72)
        if ok:
            out.append((y, m))
    return out


def _brute_expiry(y, m):
    d = dt.date(y, m, 1)
    days = []
    while d.month == m:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days[-3]


@pytest.mark.parametrize("y, m", [(2012, 1), (2012, 2), (2012, 12), (2013, 1), (2013, 6), (2014, 8)])
def test_expiry_third_to_last_business_day(y, m):
    assert str(expiry_date(y, m)) == _brute_expiry(y, m).isoformat()


def test_january_2012_listing():
    listed = listed_contracts(np.datetime64("2012-01-03"))
    labels = [c.label for c in listed]
    assert "Dec-12" in labels
    assert "Jan-13" not in labels
    assert labels[0] == "Jan-12"


@pytest.mark.parametrize("day", ["2012-01-03", "2012-05-15", "2013-11-01", "2014-02-28"])
def test_listing_matches_brute_force(day):
    d = np.datetime64(day)
    got = [(c.year, c.month) for c in listed_contracts(d)]
    want = _brute_listed(dt.date.fromisoformat(day))
    want = [w for w in want if np.datetime64(_brute_expiry(*w).isoformat()) >= d]
    assert got == want


def test_contract_calendar_contains_front_month_everywhere():
    cal = contract_calendar("2012-01-03", "2013-12-31")
    ids = {c.contract for c in cal}
    for d in TradingCalendar.business_days("2012-01-03", end="2013-12-31").dates[::7]:
        front = next(c for c in listed_contracts(d))
        assert front in ids
        assert is_listed(front, d)


def test_contract_identifier_parsing():
    assert ContractId.parse("2012-12") == ContractId(2012, 12)
    assert ContractId.parse("Dec-12") == ContractId(2012, 12)
    assert ContractId.parse("GCZ12") == ContractId(2012, 12)
    assert ContractId.parse("G13") == ContractId(2013, 2)
    with pytest.raises(ValueError):
        ContractId.parse("bogus")


def test_twelve_month_golden_sequence():
    cal = TradingCalendar.business_days("2012-01-03", end="2012-03-30")
    s = build_schedule(12, cal)
    assert s.active("2012-01-03").label == "Dec-12"
    assert s.active("2012-02-15").label == "Dec-12"
    assert s.active("2012-03-01").label == "Feb-13"
    assert [str(d) for d in s.roll_dates] == ["2012-03-01"]


def test_six_month_golden_start():
    # enumerated from the January 2012 listing: Jan, Feb, Mar, Apr, Jun are within six months
    # and Jun-12 is the furthest of them (count 6)
    s = build_schedule(6, TradingCalendar.business_days("2012-01-03", periods=5))
    assert s.contracts[0] == ContractId(2012, 6)


def test_six_month_start_without_exact_listing_picks_nearest_below():
    # in February the six-month month (Jul) is not listed; Jun is the nearest below
    s = build_schedule(6, TradingCalendar.business_days("2012-02-01", periods=3))
    assert s.contracts[0] == ContractId(2012, 6)


@pytest.mark.parametrize("tenor", [1, 2, 6, 12])
def test_schedule_invariants_three_years(tenor):
    cal = TradingCalendar.business_days("2012-01-03", end="2014-12-31")
    s = build_schedule(tenor, cal)
    assert len(s) == len(cal)
    for d, c in zip(s.dates, s.contracts):
        assert d <= c.expiry
        assert is_listed(c, d)
    assert np.all(np.abs(s.actual_tenors() - tenor) <= 1)
    if tenor == 1:
        for d in s.roll_dates:
            gap = (s.active(d).expiry - d).astype(int)
            assert 31 <= gap <= 62


def test_schedule_has_no_look_ahead():
    full = TradingCalendar.business_days("2012-01-03", end="2013-06-28")
    s_full = build_schedule(6, full)
    for cut in (40, 100, 200):
        s_cut = build_schedule(6, TradingCalendar(full.dates[:cut]))
        assert s_cut.contracts == s_full.contracts[:cut]


def test_schedule_coverage_error():
    cal = TradingCalendar.business_days("2012-01-03", end="2012-04-30")
    with pytest.raises(ScheduleCoverageError):
        build_schedule(12, cal, available=[ContractId(2012, 12)])


def _contract(y, m, dates, values):
    return FuturesContract(ContractId(y, m), PriceSeries(np.array(dates, dtype="datetime64[D]"), values, f"{y}-{m}"))


def _manual_schedule(dates, contracts, flags):
    from goldletf.roll_schedule import RollSchedule
    return RollSchedule(1, np.array(dates, dtype="datetime64[D]"), tuple(contracts), np.array(flags))


def test_continuous_single_contract_identity():
    dates = ["2012-01-03", "2012-01-04", "2012-01-05"]
    a = _contract(2012, 3, dates, [100.0, 101.0, 99.0])
    s = _manual_schedule(dates, [a.contract] * 3, [False] * 3)
    out = continuous_series(s, [a])
    np.testing.assert_array_equal(out.values, [100.0, 101.0, 99.0])


def test_continuous_ratio_splice_example():
    dates = ["2012-01-02", "2012-01-03", "2012-01-04", "2012-01-05"]
    a = _contract(2012, 3, dates[:3], [100.0, 100.0, 100.0])
    b = _contract(2012, 4, dates[2:], [102.0, 104.0])
    s = _manual_schedule(dates, [a.contract, a.contract, b.contract, b.contract], [False, False, True, False])
    out = continuous_series(s, [a, b])
    assert out.values[2] == 100.0
    assert out.values[3] / out.values[2] - 1 == pytest.approx(104 / 102 - 1, rel=1e-14)
    assert out.values[3] == pytest.approx(100 * 104 / 102, rel=1e-14)


def test_continuous_constant_contracts_constant_output():
    dates = ["2012-01-02", "2012-01-03", "2012-01-04"]
    a = _contract(2012, 3, dates, [50.0] * 3)
    b = _contract(2012, 4, dates, [70.0] * 3)
    s = _manual_schedule(dates, [a.contract, b.contract, b.contract], [False, True, False])
    np.testing.assert_array_equal(continuous_series(s, [a, b]).values, [50.0] * 3)


def test_continuous_missing_roll_price():
    dates = ["2012-01-02", "2012-01-03", "2012-01-04"]
    a = _contract(2012, 3, dates[:2], [50.0] * 2)
    b = _contract(2012, 4, dates[2:], [70.0])
    s = _manual_schedule(dates, [a.contract, b.contract, b.contract], [False, True, False])
    with pytest.raises(ScheduleCoverageError):
        continuous_series(s, [a, b])


def test_splice_return_equivalence_on_generated_schedule():
    cal = TradingCalendar.business_days("2012-01-03", end="2012-12-31")
    s = build_schedule(1, cal)
    rng = np.random.default_rng(0)
    contracts = []
    for cid in sorted(set(s.contracts)):
        px = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, cal.dates.size)))
        mask = cal.dates <= cid.expiry
        contracts.append(FuturesContract(cid, PriceSeries(cal.dates[mask], px[mask], cid.label)))
    out = continuous_series(s, contracts)
    by_id = {c.contract: c.prices for c in contracts}
    expected = []
    for i in range(1, len(s)):
        p = by_id[s.contracts[i - 1]]
        k = np.searchsorted(p.dates, s.dates[i])
        expected.append(np.log(p.values[k] / p.values[k - 1]))
    np.testing.assert_allclose(np.diff(np.log(out.values)), expected, rtol=0, atol=1e-12)
    assert out.values[0] == by_id[s.contracts[0]].values[0]
