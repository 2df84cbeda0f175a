"""Command-line front end: ``hsmrc-mi {mi,sweep,convergence,coeffs,mc}``.

Output is CSV (header row, 12 significant digits) or JSON lines carrying a
``schema_version`` field. Exit codes: 0 success, 2 invalid input, 3 numerical
guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .awgn import LN2, Modulation
from .errors import NumericalGuardError, SingularityError
from .hsmrc import ergodic_mi, parse_engine
from .montecarlo import mc_ergodic_mi
from .nakagami import Engine, MiEstimate
from .pfd import SystemConfig, pfd_coefficients
from .special import beta_definition, beta_expansion, resolve_k

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
DEFAULT_TRIALS = 1_000_000
ENGINE_CHOICES = ["auto"] + [e.value for e in Engine]


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Table:
    """Rows with a fixed column schema, written as CSV or JSON lines."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: list[dict] = []

    def add(self, **row) -> None:
        missing = set(self.columns) - row.keys()
        if missing:
            raise KeyError(f"row lacks columns {sorted(missing)}")
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise NumericalGuardError(f"non-finite value in column {key!r}")
        self.rows.append(row)

    def render(self, fmt: str) -> str:
        buf = io.StringIO()
        if fmt == "csv":
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_csv_cell(row[c]) for c in self.columns])
        else:
            for row in self.rows:
                buf.write(json.dumps({"schema_version": SCHEMA_VERSION, **row}) + "\n")
        return buf.getvalue()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def _scale(units: str) -> float:
    return 1.0 / LN2 if units == "bits" else 1.0


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _config_pair(text: str) -> tuple[int, int]:
    try:
        nr, l = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"config must look like NR:L, got {text!r}") from None
    return nr, l


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--units", choices=["bits", "nats"], default="bits")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _add_config(p: argparse.ArgumentParser, snr: bool = True) -> None:
    p.add_argument("--nr", type=int, required=True, help="receive branches N_r")
    p.add_argument("--l", type=int, required=True, help="branches combined L")
    if snr:
        p.add_argument("--snr-db", type=_finite, required=True, help="average branch SNR in dB")
    p.add_argument("--mod", choices=[m.value for m in Modulation], default="bpsk")


def _add_engine_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=_positive_int, default=None, help="series truncation (last index)")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Monte-Carlo trials")
    p.add_argument("--seed", type=int, default=0, help="Monte-Carlo seed")
    p.add_argument("--no-fallback", action="store_true", help="fail instead of switching to quadrature")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsmrc-mi", description="Ergodic BPSK/QPSK mutual information of H-S/MRC receivers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mi", help="one ergodic MI value")
    _add_config(p)
    p.add_argument("--engine", choices=ENGINE_CHOICES, default="auto")
    _add_engine_opts(p)
    _add_output(p)
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("sweep", help="MI against SNR for several configs and engines")
    p.add_argument("--config", type=_config_pair, action="append", default=[], metavar="NR:L")
    p.add_argument("--snr-start", type=_finite, required=True, help="first SNR in dB")
    p.add_argument("--snr-stop", type=_finite, required=True, help="last SNR in dB")
    p.add_argument("--points", type=_positive_int, required=True)
    p.add_argument("--engine", choices=ENGINE_CHOICES, action="append", default=None)
    p.add_argument("--mod", choices=[m.value for m in Modulation], default="bpsk")
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_engine_opts(p)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("convergence", help="partial sums against the truncation order")
    p.add_argument("--mode", choices=["beta", "mi"], required=True)
    p.add_argument("--x", type=_finite, default=1.0, help="beta argument (beta mode)")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--nr", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--snr-db", type=_finite)
    p.add_argument("--mod", choices=[m.value for m in Modulation], default="bpsk")
    p.add_argument("--engine", choices=["auto", Engine.CLOSED_FORM.value, Engine.RECURSIVE.value], default="auto")
    _add_output(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("coeffs", help="partial-fraction weights of the post-selection SNR transform")
    _add_config(p, snr=False)
    p.add_argument("--gamma-bar", type=_finite, default=1.0, help="linear average branch SNR")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("mc", help="Monte-Carlo estimate")
    _add_config(p)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_mc)
    return parser


def _config(args, snr_db: float | None = None) -> SystemConfig:
    return SystemConfig.from_db(args.nr, args.l, args.snr_db if snr_db is None else snr_db, args.mod)


def _estimate(config: SystemConfig, engine: str, args) -> MiEstimate:
    return ergodic_mi(
        config,
        engine,
        args.k,
        trials=args.trials,
        seed=args.seed,
        allow_fallback=not args.no_fallback,
    )


def cmd_mi(args) -> str:
    parse_engine(args.engine)
    resolve_k(args.k)
    config = _config(args)
    est = _estimate(config, args.engine, args)
    s = _scale(args.units)
    table = Table(["n_r", "l", "snr_db", "modulation", "engine", "k_terms", "mi", "units", "diagnostic"])
    row = dict(
        n_r=config.n_r,
        l=config.l,
        snr_db=args.snr_db,
        modulation=config.modulation.value,
        engine=est.engine.value,
        k_terms=est.k_terms,
        mi=est.nats * s,
        units=args.units,
        diagnostic=est.diagnostic * s,
    )
    if args.format == "json" and est.engine is Engine.MONTE_CARLO:
        row["std_err"] = est.diagnostic * s
    table.add(**row)
    return table.render(args.format)


@dataclass(frozen=True)
class SweepSpec:
    snr_db_start: float
    snr_db_stop: float
    points: int
    configs: tuple[SystemConfig, ...]
    engines: tuple[str, ...]

    def __post_init__(self):
        if not self.configs:
            raise UsageError("sweep needs at least one --config NR:L")
        if self.snr_db_start > self.snr_db_stop:
            raise UsageError("--snr-start must not exceed --snr-stop")
        if self.points < 1:
            raise UsageError("--points must be >= 1")

    def grid(self) -> np.ndarray:
        return np.linspace(self.snr_db_start, self.snr_db_stop, self.points)


def cmd_sweep(args) -> str:
    engines = tuple(args.engine or ["auto"])
    for e in engines:
        parse_engine(e)
    resolve_k(args.k)
    configs = tuple(SystemConfig.from_db(nr, l, 0.0, args.mod) for nr, l in args.config)
    spec = SweepSpec(args.snr_start, args.snr_stop, args.points, configs, engines)
    jobs = [(cfg, e, float(db)) for cfg in spec.configs for e in spec.engines for db in spec.grid()]

    def run(job):
        cfg, e, db = job
        return _estimate(SystemConfig.from_db(cfg.n_r, cfg.l, db, cfg.modulation), e, args)

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    s = _scale(args.units)
    mi_col = f"mi_{args.units}"
    table = Table(["snr_db", "n_r", "l", "engine", mi_col, "diagnostic"])
    for (cfg, _, db), est in zip(jobs, results):
        table.add(
            **{
                "snr_db": db,
                "n_r": cfg.n_r,
                "l": cfg.l,
                "engine": est.engine.value,
                mi_col: est.nats * s,
                "diagnostic": est.diagnostic * s,
            }
        )
    return table.render(args.format)


def cmd_convergence(args) -> str:
    if args.k_max < 1:
        raise UsageError(f"--k-max must be >= 1, got {args.k_max}")
    s = _scale(args.units)
    if args.mode == "beta":
        table = Table(["k", "definition", "expansion"])
        for k in range(1, args.k_max + 1):
            table.add(k=k, definition=beta_definition(args.x, k).value, expansion=beta_expansion(args.x, k).value)
        return table.render(args.format)
    if args.nr is None or args.l is None or args.snr_db is None:
        raise UsageError("mi mode needs --nr, --l and --snr-db")
    config = _config(args)
    mi_col = f"mi_{args.units}"
    table = Table(["k", mi_col])
    for k in range(1, args.k_max + 1):
        est = ergodic_mi(config, args.engine, k, allow_fallback=False)
        table.add(**{"k": k, mi_col: est.nats * s})
    return table.render(args.format)


def cmd_coeffs(args) -> str:
    config = SystemConfig(args.nr, args.l, args.gamma_bar, args.mod)
    expansion = pfd_coefficients(config)
    table = Table(["record", "n", "k", "c_n", "mu_n", "value"])
    for n, k, pole, a in expansion.items():
        if a != 0.0:
            table.add(record="weight", n=n, k=k, c_n=pole.c, mu_n=pole.mu, value=a)
    table.add(record="weight_sum", n=0, k=0, c_n=0.0, mu_n=0, value=expansion.weight_sum())
    table.add(record="residual", n=0, k=0, c_n=0.0, mu_n=0, value=expansion.reconstruction_residual)
    return table.render(args.format)


def cmd_mc(args) -> str:
    config = _config(args)
    res = mc_ergodic_mi(config, args.trials, args.seed, args.workers)
    s = _scale(args.units)
    table = Table(
        [
            "n_r",
            "l",
            "snr_db",
            "modulation",
            "trials",
            "seed",
            "mi",
            "std_err",
            "units",
            "empirical_mean_snr",
            "empirical_var_snr",
        ]
    )
    table.add(
        n_r=config.n_r,
        l=config.l,
        snr_db=args.snr_db,
        modulation=config.modulation.value,
        trials=res.trials,
        seed=res.seed,
        mi=res.mean_mi * s,
        std_err=res.std_err * s,
        units=args.units,
        empirical_mean_snr=res.empirical_mean_snr,
        empirical_var_snr=res.empirical_var_snr,
    )
    return table.render(args.format)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = args.func(args)
    except (NumericalGuardError, SingularityError) as exc:
        print(f"hsmrc-mi: numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:  # UsageError, ConfigurationError, DomainError
        print(f"hsmrc-mi: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
