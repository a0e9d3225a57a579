"""``goldletf`` command-line front end.

Every table is written as CSV with a leading ``# schema:`` comment line, or
as JSON with a ``schema`` key. Outputs go to ``--out`` (default:
``$GOLDLETF_OUTPUT_DIR`` or the current directory) and existing files are
only replaced with ``--force``.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import BETA_BOUND
from .benchmark import leveraged_benchmark
from .dynamic_replication import simulate, tracking_report
from .market_data import (PriceSeries, align, constant_rates, ingest_csv, money_market_series)
from .metrics import annual_returns
from .metrics import tracking_report as metrics_report
from .regression import regression_table
from .roll_schedule import SUPPORTED_TENORS, ContractId, FuturesContract, build_schedule, continuous_series
from .static_replication import StaticReplicator
from .synthetic import MarketScenario, generate_market

logger = logging.getLogger("goldletf")

OUTPUT_ENV = "GOLDLETF_OUTPUT_DIR"
SCHEMA_PREFIX = "goldletf"


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass
class RunConfig:
    """Validated view of one CLI invocation."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    futures: dict = field(default_factory=dict)
    train: tuple = None
    test: tuple = None
    beta: float = None
    tenors: tuple = ()
    holding_periods: tuple = ()
    capital: float = 1000.0
    seed: int = None
    out_dir: Path = Path(".")
    fmt: str = "csv"
    force: bool = False

    def validate(self):
        problems = []
        for key, path in list(self.inputs.items()) + [(f"futures {k}", v) for k, v in self.futures.items()]:
            if path is not None and not Path(path).exists():
                problems.append(f"{key}: file not found: {path}")
        if self.beta is not None and not (np.isfinite(self.beta) and abs(self.beta) <= BETA_BOUND):
            problems.append(f"beta {self.beta} outside [-{BETA_BOUND:g}, {BETA_BOUND:g}]")
        for t in self.tenors:
            if t not in SUPPORTED_TENORS:
                problems.append(f"tenor {t} not in {SUPPORTED_TENORS}")
        for h in self.holding_periods:
            if h < 1:
                problems.append(f"holding period {h} must be a positive integer")
        if not self.capital > 0:
            problems.append(f"capital must be positive, got {self.capital}")
        for name, rng in (("train", self.train), ("test", self.test)):
            if rng is not None and rng[0] is not None and rng[1] is not None and rng[0] > rng[1]:
                problems.append(f"{name} range starts after it ends: {rng[0]}:{rng[1]}")
        if self.train and self.test:
            a0, a1 = self.train
            b0, b1 = self.test
            lo = max(x for x in (a0, b0, np.datetime64("0001-01-01")) if x is not None)
            hi = min(x for x in (a1, b1, np.datetime64("9999-12-31")) if x is not None)
            if lo <= hi:
                problems.append("train and test ranges overlap")
        if self.fmt not in ("csv", "json"):
            problems.append(f"format must be csv or json, got {self.fmt}")
        if problems:
            raise ConfigError(problems)
        return self


class _Writer:
    """Collects output tables and writes them only after every check passes."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.files = []

    def table(self, stem, columns, rows):
        self.files.append((stem, "table", (columns, rows)))

    def document(self, stem, payload):
        self.files.append((stem, "doc", payload))

    def _render(self, stem, kind, data):
        schema = f"{SCHEMA_PREFIX}/{self.cfg.subcommand}/{stem}/v1"
        if kind == "doc":
            return f"{stem}.json", json.dumps({"schema": schema, **data}, indent=2, sort_keys=True) + "\n"
        columns, rows = data
        if self.cfg.fmt == "json":
            body = {"schema": schema, "columns": list(columns),
                    "rows": [dict(zip(columns, [_plain(v) for v in r])) for r in rows]}
            return f"{stem}.json", json.dumps(body, indent=2) + "\n"
        buf = io.StringIO()
        buf.write(f"# schema: {schema} columns={','.join(columns)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return f"{stem}.csv", buf.getvalue()

    def commit(self):
        rendered = [self._render(*f) for f in self.files]
        out = self.cfg.out_dir
        clashes = [str(out / name) for name, _ in rendered if (out / name).exists()]
        if clashes and not self.cfg.force:
            raise ConfigError([f"refusing to overwrite {p} (use --force)" for p in clashes])
        out.mkdir(parents=True, exist_ok=True)
        for name, text in rendered:
            with open(out / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return [out / name for name, _ in rendered]


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.datetime64):
        return str(v)
    return v


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(_plain(v))


def _series_rows(*series):
    dates = series[0].dates
    return [[str(d)] + [s.values[i] for s in series] for i, d in enumerate(dates)]


def _tidy_rows(*series):
    return [[str(d), s.name, v] for s in series for d, v in zip(s.dates, s.values)]


def _parse_range(text):
    if text is None:
        return None
    start, sep, end = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"range must look like START:END, got {text!r}")
    try:
        return (np.datetime64(start, "D") if start else None, np.datetime64(end, "D") if end else None)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad date in range {text!r}") from None


def _parse_int_list(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _parse_futures(items):
    out = {}
    for item in items or ():
        tenor, sep, path = item.partition("=")
        if sep:
            out[tenor.strip()] = path
        else:
            out[Path(item).stem] = item
    return out


def _slice(series, rng):
    if rng is None:
        return series
    return series.between(*rng)


def _load_price(path, name=None):
    return ingest_csv(path, kind="price", name=name)


def _load_rate(path, name="rate"):
    return ingest_csv(path, kind="rate", name=name)


# subcommands -----------------------------------------------------------------

def cmd_ingest(args, cfg, out):
    series = ingest_csv(args.input, date_column=args.date_col, value_column=args.value_col,
                        kind=args.kind, name=args.name)
    out.table(series.name, ["date", series.name], _series_rows(series))


def cmd_simulate(args, cfg, out):
    scenario = MarketScenario(seed=args.seed, horizon=args.days, mu=args.mu, sigma=args.sigma,
                              rate=args.r, carry=args.carry, start=args.start, spot0=args.spot0)
    spot, rates, futures = generate_market(scenario, cfg.tenors)
    out.table("spot", ["date", "spot"], _series_rows(spot))
    out.table("rates", ["date", "rate"], _series_rows(rates))
    for t, f in futures.items():
        out.table(f"futures_{t}m", ["date", f.name], _series_rows(f))


def cmd_roll(args, cfg, out):
    contracts = []
    if args.contracts_dir:
        for p in sorted(Path(args.contracts_dir).glob("*.csv")):
            cid = ContractId.parse(p.stem)
            contracts.append(FuturesContract(cid, _load_price(p, name=cid.label)))
        if not contracts:
            raise ConfigError([f"no contract CSVs in {args.contracts_dir}"])
        dates = np.unique(np.concatenate([c.prices.dates for c in contracts]))
        if args.start or args.end:
            dates = dates[(dates >= np.datetime64(args.start or dates[0], "D"))
                          & (dates <= np.datetime64(args.end or dates[-1], "D"))]
        schedule = build_schedule(args.tenor, dates, available=[c.contract for c in contracts])
    else:
        if not (args.start and args.end):
            raise ConfigError(["roll needs --contracts-dir or both --start and --end"])
        from .market_data import TradingCalendar
        schedule = build_schedule(args.tenor, TradingCalendar.business_days(args.start, end=args.end))
    frame = schedule.to_frame()
    out.table(f"schedule_{args.tenor}m", ["date", "contract", "roll_flag"], frame.values.tolist())
    if contracts:
        series = continuous_series(schedule, contracts)
        out.table(series.name, ["date", series.name], _series_rows(series))


def cmd_benchmark(args, cfg, out):
    spot = _load_price(args.spot, "spot")
    spot = _slice(spot, cfg.train)
    bench = leveraged_benchmark(spot, cfg.beta, args.l0)
    out.table("benchmark", ["date", bench.name], _series_rows(bench))


def cmd_regress(args, cfg, out):
    x, y = align([_load_price(args.x, "x"), _load_price(args.y, "y")])
    x, y = _slice(x, cfg.train), _slice(y, cfg.train)
    rows = regression_table(x, y, cfg.holding_periods, cfg.beta)
    columns = list(rows[0].keys())
    out.table("regression", columns, [[r[c] for c in columns] for r in rows])


def _static_inputs(args, cfg):
    futures = {k: _load_price(v, f"futures_{k}") for k, v in cfg.futures.items()}
    spot = _load_price(args.spot, "spot") if args.spot else None
    target = _load_price(args.target, "target") if args.target else None
    rates = _load_rate(args.rates) if args.rates else None
    labelled = list(futures.values()) + [s for s in (spot, target, rates) if s is not None]
    labelled = align(labelled)
    k = len(futures)
    fut = labelled[:k]
    rest = labelled[k:]
    spot = rest.pop(0) if spot is not None else None
    target = rest.pop(0) if target is not None else None
    rates = rest.pop(0) if rates is not None else constant_rates(fut[0].calendar, 0.0)
    return fut, spot, target, rates


def cmd_replicate_static(args, cfg, out):
    fut, spot, target, rates = _static_inputs(args, cfg)
    problems = []
    if not fut:
        problems.append("replicate-static needs at least one --futures")
    if target is None and spot is None:
        problems.append("need --target or --spot")
    if problems:
        raise ConfigError(problems)

    def window(rng):
        mm = money_market_series(_slice(rates, rng), cfg.capital)
        cols = [mm] + [_slice(f, rng) for f in fut]
        if target is not None:
            tgt = _slice(target, rng)
        elif cfg.beta is not None:
            tgt = leveraged_benchmark(_slice(spot, rng), cfg.beta, cfg.capital)
        else:
            tgt = _slice(spot, rng)
        return cols, tgt

    cols, tgt = window(cfg.train)
    model = StaticReplicator(capital=cfg.capital).fit(cols, tgt)
    in_rmse = model.tracking_rmse(cols, tgt)
    row = {"instruments": "+".join(cfg.futures.keys()), "w0": model.weights_[0]}
    for i, _ in enumerate(fut, start=1):
        row[f"w{i}"] = model.weights_[i]
    row.update(leverage=model.solution_.leverage, sse_in=model.sse_, rmse_in=in_rmse,
               condition_number=model.solution_.condition_number)
    if cfg.test is not None:
        cols_out, tgt_out = window(cfg.test)
        row["rmse_out"] = model.tracking_rmse(cols_out, tgt_out)
        path = model.predict(cols_out)
        target_path = cfg.capital * tgt_out.values / tgt_out.values[0]
        out.table("static_paths", ["date", "series", "value"],
                  _tidy_rows(PriceSeries(tgt_out.dates, path, "portfolio"),
                             PriceSeries(tgt_out.dates, target_path, "target")))
    out.table("weights", list(row.keys()), [list(row.values())])


def cmd_replicate_dynamic(args, cfg, out):
    futures = _load_price(cfg.futures.get("front") or next(iter(cfg.futures.values())), "futures")
    spot = _load_price(args.spot, "spot")
    series = [futures, spot] + ([_load_rate(args.rates)] if args.rates else [])
    series = [_slice(s, cfg.train) for s in align(series)]
    futures, spot = series[0], series[1]
    rates = series[2] if args.rates else constant_rates(futures.calendar, 0.0)
    path = simulate(futures, rates, cfg.beta, cfg.capital).values
    bench = leveraged_benchmark(spot, cfg.beta, cfg.capital)
    report = tracking_report(path, bench, cfg.capital)
    years = sorted(set(report.annual) | set(annual_returns(bench)))
    bench_annual = annual_returns(bench)
    out.document("dynamic_summary", {
        "beta": cfg.beta, "capital": cfg.capital, "rmse": report.rmse, "sse": report.sse,
        "per_1000": report.per_1000, "n": report.n,
        "annual": {str(y): {"portfolio": report.annual.get(y), "benchmark": bench_annual.get(y)}
                   for y in years},
    })
    out.table("annual_returns", ["year", "portfolio", "benchmark"],
              [[y, report.annual.get(y, float("nan")), bench_annual.get(y, float("nan"))] for y in years])
    out.table("dynamic_paths", ["date", "series", "value"],
              _tidy_rows(path.with_values(path.values, "portfolio"), bench.with_values(bench.values, "benchmark")))


def cmd_report(args, cfg, out):
    p, b = align([_load_price(args.portfolio, "portfolio"), _load_price(args.benchmark, "benchmark")])
    rep = metrics_report(p, b, cfg.capital, normalize=args.normalize)
    out.document("report", rep.to_dict())


COMMANDS = {
    "ingest": cmd_ingest,
    "simulate": cmd_simulate,
    "roll": cmd_roll,
    "benchmark": cmd_benchmark,
    "regress": cmd_regress,
    "replicate-static": cmd_replicate_static,
    "replicate-dynamic": cmd_replicate_dynamic,
    "report": cmd_report,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="goldletf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        return p

    p = common(sub.add_parser("ingest", help="validate and normalise a price/rate CSV"))
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("price", "rate"), default="price")
    p.add_argument("--date-col", default="date")
    p.add_argument("--value-col", default=None)
    p.add_argument("--name", default=None)

    p = common(sub.add_parser("simulate", help="write seeded synthetic spot/futures/rate CSVs"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--days", type=int, default=504)
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--sigma", type=float, default=0.18)
    p.add_argument("--r", type=float, default=0.01)
    p.add_argument("--carry", type=float, default=0.02)
    p.add_argument("--start", default="2012-01-03")
    p.add_argument("--spot0", type=float, default=1000.0)
    p.add_argument("--tenors", type=_parse_int_list, default=SUPPORTED_TENORS)

    p = common(sub.add_parser("roll", help="roll schedule and spliced continuous series"))
    p.add_argument("--tenor", type=int, required=True, choices=SUPPORTED_TENORS)
    p.add_argument("--contracts-dir", default=None,
                   help="directory of per-contract CSVs named e.g. 2012-12.csv or GCZ12.csv")
    p.add_argument("--start", default=None)
    p.add_argument("--end", default=None)

    p = common(sub.add_parser("benchmark", help="leveraged benchmark of a spot series"))
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--spot", required=True)
    p.add_argument("--l0", type=float, default=None, help="initial level (default: first spot value)")
    p.add_argument("--range", type=_parse_range, default=None, dest="train")

    p = common(sub.add_parser("regress", help="return regressions across holding periods"))
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--h", type=_parse_int_list, default=(1,))
    p.add_argument("--test-slope", type=float, default=None, dest="beta")
    p.add_argument("--range", type=_parse_range, default=None, dest="train")

    p = common(sub.add_parser("replicate-static", help="constrained least-squares static replication"))
    p.add_argument("--target", default=None, help="target price CSV")
    p.add_argument("--spot", default=None, help="spot CSV; target when --target is absent")
    p.add_argument("--beta", type=float, default=None, help="track the beta-leveraged spot benchmark")
    p.add_argument("--futures", action="append", default=[], metavar="TENOR=PATH")
    p.add_argument("--rates", default=None, help="overnight rate CSV for the money-market column")
    p.add_argument("--train", type=_parse_range, default=None)
    p.add_argument("--test", type=_parse_range, default=None)
    p.add_argument("--capital", type=float, default=1000.0)

    p = common(sub.add_parser("replicate-dynamic", help="daily-rebalanced leveraged futures portfolio"))
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--futures", action="append", required=True, metavar="[TENOR=]PATH")
    p.add_argument("--rates", default=None)
    p.add_argument("--spot", required=True)
    p.add_argument("--range", type=_parse_range, default=None, dest="train")
    p.add_argument("--capital", type=float, default=1000.0)

    p = common(sub.add_parser("report", help="tracking metrics of a portfolio path vs a benchmark"))
    p.add_argument("--portfolio", required=True)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--normalize", action="store_true", help="rescale both to start at --capital")
    p.add_argument("--capital", type=float, default=1000.0)
    return parser


def config_from_args(args):
    inputs = {k: getattr(args, k) for k in
              ("input", "spot", "x", "y", "target", "rates", "portfolio", "benchmark", "contracts_dir")
              if getattr(args, k, None) is not None}
    futures = _parse_futures(args.futures) if isinstance(getattr(args, "futures", None), list) else {}
    out_dir = args.out or os.environ.get(OUTPUT_ENV) or "."
    tenors = getattr(args, "tenors", ())
    if getattr(args, "tenor", None) is not None:
        tenors = (args.tenor,)
    return RunConfig(
        subcommand=args.subcommand, inputs=inputs, futures=futures,
        train=getattr(args, "train", None), test=getattr(args, "test", None),
        beta=getattr(args, "beta", None), tenors=tuple(tenors),
        holding_periods=tuple(getattr(args, "h", ()) or ()),
        capital=getattr(args, "capital", 1000.0), seed=getattr(args, "seed", None),
        out_dir=Path(out_dir), fmt=args.format, force=args.force,
    )


def run(argv=None):
    """Parse ``argv``, run one subcommand and return the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args).validate()
        out = _Writer(cfg)
        COMMANDS[args.subcommand](args, cfg, out)
        for path in out.commit():
            logger.info("wrote %s", path)
    except ConfigError as exc:
        print(f"goldletf {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"goldletf {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
