"""Batch front door: parse a symbol and a space, run one job per process,
emit CSV or JSON with the version and the effective config echoed into every
output.  Re-running a job reproduces the output byte for byte.

Exit codes: 1 config/parse error, 2 quadrature failure, 3 assertion failure
in experiment mode.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .asymptotics import compare, predicted_law, run_counterexample, run_periphery
from .errors import (InsufficientKMaxError, NonIntegrableError, SupportUnknownError,
                     SymbolSyntaxError, ToleranceNotMetError)
from .ordering import counting
from .quadrature import TOL_MAX, TOL_MIN
from .spectra import SpaceSpec, spectrum, table_to_csv, table_to_json
from .symbols import classify_decay, parse_symbol

COMMANDS = ("spectrum", "counting", "compare", "counterexample", "periphery")


@dataclass
class JobConfig:
    command: str
    space: str | None = None
    d: int = 1
    R: float | None = None
    symbol: str | None = None
    kmax: int = 100
    tol: float = 1e-10
    lambda_min_log10: float = -40.0
    lambda_max_log10: float = -5.0
    grid_points: int = 36
    out: str = "-"
    format: str = "csv"
    p: float = 2.0
    q: float = 4.0

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not (TOL_MIN < self.tol < TOL_MAX):
            raise ValueError(f"tol must lie in ({TOL_MIN:g}, {TOL_MAX:g})")
        if not (self.lambda_min_log10 < self.lambda_max_log10 <= 0):
            raise ValueError("lambda grid needs min_log10 < max_log10 <= 0")
        if self.grid_points < 2:
            raise ValueError("grid must have at least 2 points")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.kmax < 0:
            raise ValueError("kmax must be nonnegative")
        if self.command != "counterexample":
            if self.space is None:
                raise ValueError("--space is required")
            if self.symbol is None:
                raise ValueError("--symbol is required")

    def space_spec(self) -> SpaceSpec:
        return SpaceSpec(self.space, self.d, self.R)

    def lambda_grid(self):
        return np.logspace(self.lambda_min_log10, self.lambda_max_log10, self.grid_points)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="radial-toeplitz",
        description="Eigenvalue tables, counting functions and asymptotic "
                    "experiments for Toeplitz operators with radial symbols.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file with the same keys as the flags")
    ap.add_argument("--space", help="one of the seven space kinds")
    ap.add_argument("--d", type=int)
    ap.add_argument("--R", type=float, help="ball radius (Bergman kinds)")
    ap.add_argument("--symbol", help="radial symbol text, e.g. 'chi(0,0.5)'")
    ap.add_argument("--kmax", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--lambda-min-log10", type=float, dest="lambda_min_log10")
    ap.add_argument("--lambda-max-log10", type=float, dest="lambda_max_log10")
    ap.add_argument("--grid-points", type=int, dest="grid_points")
    ap.add_argument("--out", help="output path ('-' for stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--p", type=float, help="counterexample decay exponent")
    ap.add_argument("--q", type=float, help="counterexample oscillation exponent")
    return ap


def load_config(argv) -> JobConfig:
    args = build_parser().parse_args(argv)
    cfg = JobConfig(command=args.command)
    if args.config:
        with open(args.config) as fh:
            for key, val in json.load(fh).items():
                if key == "command":
                    cfg.command = val
                elif hasattr(cfg, key):
                    setattr(cfg, key, val)
                else:
                    raise ValueError(f"unknown config key {key!r}")
    for key in ("space", "d", "R", "symbol", "kmax", "tol", "lambda_min_log10",
                "lambda_max_log10", "grid_points", "out", "format", "p", "q"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


def _config_echo(cfg: JobConfig) -> dict:
    return {k: v for k, v in asdict(cfg).items() if v is not None}


def _emit(cfg: JobConfig, text: str):
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w") as fh:
            fh.write(text)


def _csv_header(cfg: JobConfig) -> str:
    return (f"# version={__version__}\n"
            f"# config={json.dumps(_config_echo(cfg), sort_keys=True)}\n")


def _json_doc(cfg: JobConfig, payload: dict) -> str:
    return json.dumps({"version": __version__,
                       "config": _config_echo(cfg), **payload}, indent=1) + "\n"


def _run_spectrum(cfg: JobConfig):
    table = spectrum(cfg.space_spec(), parse_symbol(cfg.symbol), cfg.kmax, cfg.tol)
    if cfg.format == "csv":
        _emit(cfg, _csv_header(cfg) + table_to_csv(table))
    else:
        _emit(cfg, _json_doc(cfg, json.loads(table_to_json(table))))
    return 0


def _run_counting(cfg: JobConfig):
    table = spectrum(cfg.space_spec(), parse_symbol(cfg.symbol), cfg.kmax, cfg.tol)
    rows = []
    for lam in sorted(cfg.lambda_grid()):
        n, n_plus, n_minus = counting(table, float(lam))
        rows.append({"lambda": float(lam), "n": n, "n_plus": n_plus, "n_minus": n_minus})
    if cfg.format == "csv":
        lines = [f"{r['lambda']!r},{r['n']},{r['n_plus']},{r['n_minus']}" for r in rows]
        _emit(cfg, _csv_header(cfg) + "lambda,n,n_plus,n_minus\n" + "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json_doc(cfg, {"rows": rows}))
    return 0


def _run_compare(cfg: JobConfig):
    V = parse_symbol(cfg.symbol)
    space = cfg.space_spec()
    table = spectrum(space, V, cfg.kmax, cfg.tol)
    law = predicted_law(space, classify_decay(V))
    rep = compare(table, law, cfg.lambda_grid())
    summary = {
        "law": {"coefficient": law.coefficient, "log_power": law.log_power,
                "loglog_power": law.loglog_power},
        "max_ratio": rep.max_ratio, "final_ratio": rep.final_ratio,
    }
    if cfg.format == "csv":
        lines = [f"{lam!r},{n},{pred!r},{ratio!r}"
                 for lam, n, pred, ratio in zip(rep.lambdas, rep.n_computed,
                                                rep.n_predicted, rep.ratios)]
        header = _csv_header(cfg) + f"# law={json.dumps(summary['law'], sort_keys=True)}\n"
        _emit(cfg, header + "lambda,n,predicted,ratio\n" + "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json_doc(cfg, {**summary,
                                   "rows": [{"lambda": lam, "n": n, "predicted": pred,
                                             "ratio": ratio}
                                            for lam, n, pred, ratio in
                                            zip(rep.lambdas, rep.n_computed,
                                                rep.n_predicted, rep.ratios)]}))
    return 0


def _run_counterexample(cfg: JobConfig):
    rep = run_counterexample(cfg.p, cfg.q, cfg.kmax, tol=cfg.tol)
    payload = {
        "experiment": "counterexample",
        "p": rep.p, "q": rep.q, "k_max": rep.k_max,
        "fit_range": list(rep.fit_range),
        "slope_v": rep.slope_v, "slope_v_linear": rep.slope_v_linear,
        "slope_abs": rep.slope_abs, "slope_abs_linear": rep.slope_abs_linear,
        "separation": rep.separation,
        "bound_margin_log": rep.bound_margin_log,
        "assertions": rep.assertions,
        "passed": rep.passed,
    }
    if cfg.format == "csv":
        lines = [
            f"{e.k},{e.value.sign},{e.value.log_abs!r},{a.value.sign},{a.value.log_abs!r}"
            for e, a in zip(rep.table_v.entries, rep.table_abs.entries)]
        header = _csv_header(cfg) + f"# report={json.dumps(payload, sort_keys=True)}\n"
        _emit(cfg, header + "k,sign_v,log_abs_v,sign_abs,log_abs_abs\n" + "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json_doc(cfg, payload))
    if not rep.passed:
        failing = [name for name, ok in rep.assertions.items() if not ok]
        print(f"counterexample assertions failed: {', '.join(failing)}", file=sys.stderr)
        return 3
    return 0


def _run_periphery(cfg: JobConfig):
    rep = run_periphery(parse_symbol(cfg.symbol), cfg.space_spec(), cfg.kmax,
                        tol=cfg.tol, lambda_grid=cfg.lambda_grid())
    payload = {
        "experiment": "periphery",
        "symbol": rep.symbol_text,
        "k_max": rep.k_max,
        "exact_support_radius": rep.esr,
        "largest_negative_k": rep.largest_negative_k,
        "n_negative": rep.n_negative,
        "lambdas": list(rep.lambdas),
        "positive_ratios": list(rep.positive_ratios),
        "ratio_at_min_lambda": rep.ratio_at_min_lambda,
        "assertions": rep.assertions,
        "passed": rep.passed,
    }
    if cfg.format == "csv":
        lines = [f"{lam!r},{ratio!r}" for lam, ratio in zip(rep.lambdas, rep.positive_ratios)]
        header = _csv_header(cfg) + f"# report={json.dumps(payload, sort_keys=True)}\n"
        _emit(cfg, header + "lambda,positive_ratio\n" + "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json_doc(cfg, payload))
    if not rep.passed:
        failing = [name for name, ok in rep.assertions.items() if not ok]
        print(f"periphery assertions failed: {', '.join(failing)}", file=sys.stderr)
        return 3
    return 0


_RUNNERS = {
    "spectrum": _run_spectrum,
    "counting": _run_counting,
    "compare": _run_compare,
    "counterexample": _run_counterexample,
    "periphery": _run_periphery,
}


def run(cfg: JobConfig) -> int:
    return _RUNNERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except SystemExit as exc:  # argparse already printed the message
        return 1 if exc.code else 0
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(cfg)
    except (ToleranceNotMetError, NonIntegrableError, InsufficientKMaxError,
            ArithmeticError) as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return 2
    except (SymbolSyntaxError, SupportUnknownError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
