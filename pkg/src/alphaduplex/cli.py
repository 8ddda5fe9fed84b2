"""Batch front door: config parsing, subcommands, CSV emission.

Configuration is a flat INI document with sections [params], [sim],
[pulses], and [sweep]; every key is optional and falls back to the
reference parameter set.  Physical quantities accept explicit unit
suffixes (dBm, mW, W, dB, kHz, MHz, GHz, /km2, km) so the mixed-unit
parameter table can be transcribed verbatim.  All outputs are CSV or
key=value text with %.12g formatting, so identical configs and seeds
reproduce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 validation failure,
4 UE placement starvation, 5 quadrature failure.  Failures print one
machine-readable JSON line to stderr.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

from .analytic import ber_downlink, ber_downlink_eta4, ber_uplink, ber_uplink_eta4
from .model import Direction, SystemParams, db_to_linear, dbm_to_watts
from .montecarlo import SimConfig, StarvationError, run_campaign
from .pulse import BandPlan, PulseKind, PulsePair, interference_factors, make_pulses
from .specfun import QuadratureError
from .sweep import (
    NoCrossingError,
    SweepSource,
    compare_duplex_schemes,
    find_operating_points,
    sweep_alpha,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_STARVATION = 4
EXIT_QUADRATURE = 5

BER_TOLERANCE = 0.02   # cross-validation gate, absolute BER units
WORKERS_ENV = "ALPHADUPLEX_WORKERS"

_DEFAULT_GRID = "0:1:0.1"
_DEFAULT_N_REALIZATIONS = 100
_DEFAULT_SEED = 1


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs for one batch command."""

    params: SystemParams
    sim: SimConfig
    pulses: PulsePair
    alpha_grid: tuple[float, ...]
    outputs: str = "."
    refine_tol: float = 1e-9


def _strip_unit(raw: str, units: dict[str, float]) -> float:
    """Parse '<number> [unit]' with multiplicative unit conversion."""
    text = raw.strip()
    for suffix, scale in units.items():
        if suffix and text.lower().endswith(suffix.lower()):
            head = text[: -len(suffix)].strip()
            return float(head) * scale
    return float(text)


def _parse_power(raw: str, key: str) -> float:
    text = raw.strip()
    try:
        if text.lower().endswith("dbm"):
            return dbm_to_watts(float(text[:-3].strip()))
        return _strip_unit(text, {"mw": 1e-3, "w": 1.0})
    except ValueError:
        raise ConfigError(f"{key}: cannot parse power value {raw!r} "
                          "(use W, mW, or dBm)") from None


def _parse_ratio(raw: str, key: str) -> float:
    text = raw.strip()
    try:
        if text.lower().endswith("db"):
            return db_to_linear(float(text[:-2].strip()))
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse ratio value {raw!r} "
                          "(use a linear value or dB)") from None


def _parse_frequency(raw: str, key: str) -> float:
    try:
        return _strip_unit(raw, {"ghz": 1e9, "mhz": 1e6, "khz": 1e3, "hz": 1.0})
    except ValueError:
        raise ConfigError(f"{key}: cannot parse frequency value {raw!r} "
                          "(use Hz, kHz, MHz, or GHz)") from None


def _parse_density(raw: str, key: str) -> float:
    try:
        return _strip_unit(raw, {"/km2": 1.0})
    except ValueError:
        raise ConfigError(f"{key}: cannot parse density value {raw!r} "
                          "(per km2)") from None


def _parse_length_km(raw: str, key: str) -> float:
    try:
        return _strip_unit(raw, {"km": 1.0})
    except ValueError:
        raise ConfigError(f"{key}: cannot parse length value {raw!r} "
                          "(km)") from None


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse number {raw!r}") from None


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse integer {raw!r}") from None


def _parse_pulse(raw: str, key: str) -> PulseKind:
    name = raw.strip().upper()
    try:
        return PulseKind[name]
    except KeyError:
        valid = ", ".join(k.name.lower() for k in PulseKind)
        raise ConfigError(f"{key}: unknown pulse kind {raw!r} "
                          f"(expected one of: {valid})") from None


def parse_alpha_grid(spec: str) -> tuple[float, ...]:
    """Expand 'start:stop:step' into an inclusive increasing grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"alpha_grid: expected start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"alpha_grid: non-numeric field in {spec!r}") from None
    if step <= 0.0:
        raise ConfigError("alpha_grid: step must be positive")
    if stop < start:
        raise ConfigError("alpha_grid: stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = [start + i * step for i in range(n)]
    # snap endpoint rounding residue back onto the unit interval
    grid = [0.0 if abs(v) < 1e-12 else 1.0 if abs(v - 1.0) < 1e-12 else v
            for v in grid]
    if any(not 0.0 <= v <= 1.0 for v in grid):
        raise ConfigError("alpha_grid: values must lie in [0, 1]")
    return tuple(grid)


_PARAM_PARSERS = {
    "lambda_bs": _parse_density,
    "eta": _parse_float,
    "rho": _parse_power,
    "p_b": _parse_power,
    "p_u_max": _parse_power,
    "beta": _parse_ratio,
    "n0": _parse_power,
    "b_u": _parse_frequency,
    "b_d": _parse_frequency,
    "omega1_u": _parse_float,
    "omega2_u": _parse_float,
    "omega1_d": _parse_float,
    "omega2_d": _parse_float,
    "m_symbols": _parse_int,
}

_SIM_PARSERS = {
    "n_realizations": _parse_int,
    "seed": _parse_int,
    "region_side": _parse_length_km,
    "core_side": _parse_length_km,
    "candidate_cap": _parse_int,
}

_KNOWN_SECTIONS = ("params", "sim", "pulses", "sweep")


def parse_config(text: str) -> RunConfig:
    """Resolve a configuration document against the reference defaults."""
    ini = configparser.ConfigParser(interpolation=None)
    try:
        ini.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None

    for section in ini.sections():
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(f"unknown section [{section}] "
                              f"(expected {', '.join(_KNOWN_SECTIONS)})")

    def section_items(name: str, parsers: dict) -> dict:
        if not ini.has_section(name):
            return {}
        out = {}
        for key, raw in ini.items(name):
            if key not in parsers:
                raise ConfigError(f"unknown key {key!r} in section [{name}]")
            out[key] = parsers[key](raw, key)
        return out

    try:
        params = dataclasses.replace(SystemParams(),
                                     **section_items("params", _PARAM_PARSERS))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    sim_kwargs = {"n_realizations": _DEFAULT_N_REALIZATIONS,
                  "seed": _DEFAULT_SEED}
    sim_kwargs.update(section_items("sim", _SIM_PARSERS))
    try:
        sim = SimConfig(**sim_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    pulse_kwargs = {"uplink": PulseKind.TRIANGULAR,
                    "downlink": PulseKind.RECTANGULAR}
    pulse_kwargs.update(section_items("pulses", {"uplink": _parse_pulse,
                                                 "downlink": _parse_pulse}))
    pulses = PulsePair(**pulse_kwargs)

    sweep_opts = section_items("sweep", {"alpha_grid": lambda raw, key: raw,
                                         "refine_tol": _parse_float})
    alpha_grid = parse_alpha_grid(sweep_opts.get("alpha_grid", _DEFAULT_GRID))
    refine_tol = sweep_opts.get("refine_tol", 1e-9)
    if not 1e-12 <= refine_tol < 1.0:
        raise ConfigError(f"refine_tol must lie in [1e-12, 1), got {refine_tol}")

    return RunConfig(params=params, sim=sim, pulses=pulses,
                     alpha_grid=alpha_grid, refine_tol=refine_tol)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_lines(path: str, lines) -> None:
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.outputs, exist_ok=True)
    return os.path.join(cfg.outputs, name)


def cmd_factors(cfg: RunConfig) -> int:
    rows = []
    for alpha in cfg.alpha_grid:
        plan = BandPlan(cfg.params.b_u, cfg.params.b_d, alpha)
        fac = interference_factors(plan, *make_pulses(cfg.pulses, plan))
        rows.append((alpha, fac.i_du_sq, fac.i_ud_sq))
    path = _out_path(cfg, "factors.csv")
    _write_csv(path, ("alpha", "i_du_sq", "i_ud_sq"), rows)
    print(f"wrote {path}")
    return EXIT_OK


def _analytic_rows(cfg: RunConfig):
    sr = sweep_alpha(cfg.params, cfg.pulses, cfg.alpha_grid,
                     SweepSource.ANALYTIC, workers=_workers())
    for alpha, ul, dl in sr.rows:
        for m in (ul, dl):
            yield (m.direction.value, alpha, m.ber, m.bandwidth, m.throughput)


def cmd_analytic(cfg: RunConfig) -> int:
    path = _out_path(cfg, "analytic.csv")
    _write_csv(path, ("direction", "alpha", "ber", "bandwidth_hz",
                      "throughput_bps"), _analytic_rows(cfg))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    metrics = run_campaign(cfg.params, cfg.sim, list(cfg.alpha_grid),
                           cfg.pulses)
    rows = [(m.direction.value, m.alpha, m.mean_ber, m.std_err, m.n_links,
             m.bandwidth, m.throughput) for m in metrics]
    path = _out_path(cfg, "simulate.csv")
    _write_csv(path, ("direction", "alpha", "mean_ber", "std_err", "n_links",
                      "bandwidth_hz", "throughput_bps"), rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    sr = sweep_alpha(cfg.params, cfg.pulses, cfg.alpha_grid,
                     SweepSource.ANALYTIC, workers=_workers())
    csv_path = _out_path(cfg, "sweep.csv")
    _write_csv(csv_path, ("alpha", "t_ul", "t_dl", "ber_ul", "ber_dl"),
               sr.table())
    lines = []
    try:
        points = find_operating_points(sr, refine_tol=cfg.refine_tol)
    except NoCrossingError:
        lines.append("no_crossing=true")
    else:
        record = compare_duplex_schemes(sr, points)
        lines.extend(record.lines())
        for i, crossing in enumerate(points.crossings, start=1):
            lines.append(f"crossing_{i}_alpha={crossing.alpha:.12g}")
    summary_path = _out_path(cfg, "summary.txt")
    _write_lines(summary_path, lines)
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    metrics = run_campaign(cfg.params, cfg.sim, list(cfg.alpha_grid),
                           cfg.pulses)
    eta4 = cfg.params.eta == 4.0
    ul_fn = ber_uplink_eta4 if eta4 else ber_uplink
    dl_fn = ber_downlink_eta4 if eta4 else ber_downlink
    rows = []
    max_gap = {Direction.UPLINK: 0.0, Direction.DOWNLINK: 0.0}
    failed = False
    for m in metrics:
        plan = BandPlan(cfg.params.b_u, cfg.params.b_d, m.alpha)
        fac = interference_factors(plan, *make_pulses(cfg.pulses, plan))
        fn = ul_fn if m.direction is Direction.UPLINK else dl_fn
        analytic_ber = fn(m.alpha, fac, cfg.params).ber
        gap = abs(analytic_ber - m.mean_ber)
        tol = max(BER_TOLERANCE, 4.0 * m.std_err)
        ok = gap <= tol
        failed = failed or not ok
        max_gap[m.direction] = max(max_gap[m.direction], gap)
        rows.append((m.direction.value, m.alpha, analytic_ber, m.mean_ber,
                     m.std_err, gap, tol, "pass" if ok else "fail"))
    path = _out_path(cfg, "validate.csv")
    _write_csv(path, ("direction", "alpha", "analytic_ber", "empirical_ber",
                      "std_err", "abs_gap", "tolerance", "status"), rows)
    lines = [
        f"max_abs_gap_ul={max_gap[Direction.UPLINK]:.12g}",
        f"max_abs_gap_dl={max_gap[Direction.DOWNLINK]:.12g}",
        f"base_tolerance={BER_TOLERANCE:.12g}",
        f"status={'fail' if failed else 'pass'}",
    ]
    _write_lines(_out_path(cfg, "validate.txt"), lines)
    print(f"wrote {path}")
    for line in lines:
        print(line)
    return EXIT_VALIDATION if failed else EXIT_OK


_COMMANDS = {
    "factors": cmd_factors,
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphaduplex",
        description="Partial-overlap duplexing: BER/throughput analysis, "
                    "simulation, and operating-point search.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="configuration file (INI; omit for defaults)")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default: current directory)")
    common.add_argument("--seed", metavar="N", type=int,
                        help="override the simulation seed")
    common.add_argument("--alpha-grid", metavar="START:STOP:STEP",
                        help="override the overlap-fraction grid")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("factors", parents=[common],
                   help="effective interference factors vs overlap")
    sub.add_parser("analytic", parents=[common],
                   help="closed-form BER/throughput vs overlap")
    sub.add_parser("simulate", parents=[common],
                   help="Monte Carlo BER/throughput vs overlap")
    sub.add_parser("sweep", parents=[common],
                   help="analytic sweep plus operating points and "
                        "scheme comparison")
    sub.add_parser("validate", parents=[common],
                   help="cross-check simulation against the closed forms")
    return parser


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}")
        cfg = parse_config(text)
    else:
        cfg = parse_config("")
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        cfg = dataclasses.replace(
            cfg, sim=dataclasses.replace(cfg.sim, seed=args.seed))
    if args.alpha_grid is not None:
        cfg = dataclasses.replace(
            cfg, alpha_grid=parse_alpha_grid(args.alpha_grid))
    if args.out is not None:
        cfg = dataclasses.replace(cfg, outputs=args.out)
    return cfg


def _error_line(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_run_config(args)
    except ConfigError as exc:
        _error_line("config", str(exc))
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](cfg)
    except StarvationError as exc:
        _error_line("starvation", str(exc))
        return EXIT_STARVATION
    except QuadratureError as exc:
        _error_line("quadrature", str(exc))
        return EXIT_QUADRATURE
    except ConfigError as exc:
        _error_line("config", str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
