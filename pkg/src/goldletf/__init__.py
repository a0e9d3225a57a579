"""Leveraged gold ETF benchmarks, futures replication and tracking analysis."""

__version__ = "0.1.0"

from ._validation import RuinError
from .benchmark import LeveragedBenchmark, leverage_sensitivity, leveraged_benchmark
from .dynamic_replication import (DynamicLeverageReplicator, LeveredPortfolioPath, VarianceLedger,
                                  logprice_prediction, realized_variance, simulate, tracking_report)
from .market_data import (IngestError, PriceSeries, RateSeries, TradingCalendar, align, ingest_csv,
                          money_market_series)
from .metrics import TrackingReport, annual_returns, cumulative_returns, rmse, sse
from .regression import (HypothesisResult, OLSRegression, RegressionFit, intercept_test, ols_fit,
                         return_differential, slope_test, student_t_cdf)
from .returns import ReturnSeries, simple_returns
from .roll_schedule import (ContractId, FuturesContract, RollSchedule, build_schedule, continuous_series,
                            contract_calendar)
from .static_replication import (ReplicationWeights, StaticReplicator, normalize, portfolio_value,
                                 solve_constrained_lsq)
from .synthetic import MarketScenario, generate_futures_curve, generate_market, generate_spot

__all__ = [
    "ContractId", "DynamicLeverageReplicator", "FuturesContract", "HypothesisResult", "IngestError",
    "LeveragedBenchmark", "LeveredPortfolioPath", "MarketScenario", "OLSRegression", "PriceSeries",
    "RateSeries", "RegressionFit", "ReplicationWeights", "ReturnSeries", "RollSchedule", "RuinError",
    "StaticReplicator", "TrackingReport", "TradingCalendar", "VarianceLedger", "align", "annual_returns",
    "build_schedule", "continuous_series", "contract_calendar", "cumulative_returns",
    "generate_futures_curve", "generate_market", "generate_spot", "ingest_csv", "intercept_test",
    "leverage_sensitivity", "leveraged_benchmark", "logprice_prediction", "money_market_series", "normalize", "ols_fit",
    "portfolio_value", "realized_variance", "return_differential", "rmse", "simple_returns", "simulate",
    "slope_test", "solve_constrained_lsq", "sse", "student_t_cdf", "tracking_report",
]
