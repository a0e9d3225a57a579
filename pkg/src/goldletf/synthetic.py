"""Seeded synthetic spot, futures and rate series.

Random stream (frozen; golden files depend on it):

* bit generator: PCG64 (XSL-RR 128/64) as implemented by numpy;
* seeding: ``numpy.random.SeedSequence(seed, spawn_key=(stream_id,))`` with
  ``stream_id`` 0 for spot (see ``STREAMS``);
* uniforms: ``u = ((x >> 11) + 0.5) * 2**-53`` for each 64-bit output ``x``,
  so ``u`` lies strictly inside (0, 1);
* normals: ``z = Phi^{-1}(u)`` by Wichura's AS241 (PPND16), one uniform per
  variate, consumed in date order.
"""

import math
from dataclasses import dataclass

import numpy as np

from .market_data import DT, PriceSeries, RateSeries, TradingCalendar, constant_rates
from .roll_schedule import FuturesContract, build_schedule, continuous_series

STREAMS = {"spot": 0}
DEFAULT_START = "2012-01-03"
_DAYS_PER_YEAR = 365.0

# AS241 coefficients
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coefs, x):
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def inverse_normal_cdf(p):
    """Standard normal quantile (AS241, relative accuracy about 1e-16)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p!r}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        val = _poly(_E, r) / _poly(_F, r)
    return -val if q < 0 else val


class NormalStream:
    """Deterministic standard-normal variates for one instrument stream."""

    def __init__(self, seed, stream="spot"):
        stream_id = STREAMS[stream] if isinstance(stream, str) else int(stream)
        ss = np.random.SeedSequence(int(seed), spawn_key=(stream_id,))
        self._bitgen = np.random.PCG64(ss)

    def uniforms(self, n):
        raw = self._bitgen.random_raw(n).astype(np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normals(self, n):
        return np.array([inverse_normal_cdf(u) for u in self.uniforms(n)])


@dataclass(frozen=True)
class MarketScenario:
    """Constant-parameter GBM market with a flat carry term structure.

    ``horizon`` is the number of trading days (points) in the path; ``mu``,
    ``sigma``, ``rate`` and ``carry`` are annualized.
    """

    seed: int = 42
    horizon: int = 504
    mu: float = 0.05
    sigma: float = 0.18
    rate: float = 0.01
    carry: float = 0.02
    start: str = DEFAULT_START
    spot0: float = 1000.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.horizon < 2:
            raise ValueError("horizon must be at least 2 trading days")
        if self.spot0 <= 0:
            raise ValueError("spot0 must be positive")

    @property
    def calendar(self):
        return TradingCalendar.business_days(self.start, periods=self.horizon)


def gbm_path(normals, mu, sigma, dt=DT, s0=1.0):
    """Exact-scheme GBM levels from a vector of standard normals."""
    z = np.asarray(normals, dtype=float)
    steps = (mu - 0.5 * sigma * sigma) * dt + sigma * math.sqrt(dt) * z
    return s0 * np.exp(np.concatenate(([0.0], np.cumsum(steps))))


def generate_spot(scenario, dt=DT, name="spot"):
    """Seeded spot path on the scenario's business-day calendar."""
    z = NormalStream(scenario.seed, "spot").normals(scenario.horizon - 1)
    values = gbm_path(z, scenario.mu, scenario.sigma, dt, scenario.spot0)
    return PriceSeries(scenario.calendar.dates, values, name)


def generate_rates(scenario, name="rate"):
    return constant_rates(scenario.calendar, scenario.rate, name)


def contract_prices(spot, scenario, contracts):
    """Settlement path ``G * exp(carry * tau)`` for each contract, up to its expiry."""
    out = []
    for c in contracts:
        cid = getattr(c, "contract", c)
        mask = spot.dates <= cid.expiry
        if not mask.any():
            continue
        dates = spot.dates[mask]
        tau = (cid.expiry - dates).astype(float) / _DAYS_PER_YEAR
        out.append(FuturesContract(cid, PriceSeries(dates, spot.values[mask] * np.exp(scenario.carry * tau),
                                                    cid.label)))
    return out


def generate_futures_curve(spot, scenario, tenor, spliced=False):
    """Futures prices for a nominal tenor under the roll schedule.

    By default returns the active contract's own price each day,
    ``F = G * exp(carry * tau)`` with ``tau`` the year fraction to its expiry
    (ACT/365). With ``spliced`` the active contracts are ratio-spliced into a
    return-preserving continuous series.
    """
    if tenor < 0:
        raise ValueError("tenor must be non-negative")
    if tenor == 0:
        return PriceSeries(spot.dates, spot.values, "futures_0m")
    schedule = build_schedule(tenor, spot.dates)
    if spliced:
        contracts = contract_prices(spot, scenario, sorted(set(schedule.contracts)))
        return continuous_series(schedule, contracts, f"futures_{tenor}m")
    expiries = np.array([c.expiry for c in schedule.contracts], dtype="datetime64[D]")
    tau = (expiries - spot.dates).astype(float) / _DAYS_PER_YEAR
    return PriceSeries(spot.dates, spot.values * np.exp(scenario.carry * tau), f"futures_{tenor}m")


def generate_market(scenario, tenors=(1, 2, 6, 12), spliced=True):
    """Spot, rate and per-tenor futures series for one scenario."""
    spot = generate_spot(scenario)
    futures = {t: generate_futures_curve(spot, scenario, t, spliced=spliced) for t in tenors}
    return spot, generate_rates(scenario), futures
