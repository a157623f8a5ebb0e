"""Command-line entry point: ``aerosim <subcommand>``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import __version__
from .config import SCHEMA, ConfigError, link_params, load_document, load_scenario, scenario_from_document
from .linkbudget import LinkBudgetError, fspl_db, radio_horizon_km, received_power_dbm, snr_db
from .radio import RadioConfig, validate_radio
from .scenario import ScenarioError, aggregate, aggregate_csv, packets_csv, run_sweep, runs_csv
from .tracegen import TracegenError, generate_synthetic_flights, write_trace_set
from .engine import RngStream

log = logging.getLogger("aerosim")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _write(path: Path, text: str) -> Path:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
    return path


def _write_manifest(out: Path, command: str, argv: List[str], outputs: List[Path]) -> None:
    # wall-clock data lives only here, never in the CSVs
    manifest = {
        "command": command,
        "argv": argv,
        "version": __version__,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": [p.name for p in outputs],
    }
    _write(out / "run_manifest.json", json.dumps(manifest, indent=2) + "\n")


def cmd_simulate(args, argv) -> int:
    config = load_scenario(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, base_seed=args.seed)
    runs = config.runs if args.runs is None else args.runs
    if runs < 1:
        raise ConfigError("--runs must be at least 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_sweep(config, runs=runs)
    aggs = aggregate(results) if results else []
    outputs = [_write(out / "runs.csv", runs_csv(results)), _write(out / "aggregate.csv", aggregate_csv(aggs))]
    if args.packet_log:
        outputs.append(_write(out / "packets.csv", packets_csv(results)))
    if not args.no_plots and aggs:
        from .plotting import plot_packet_counts

        outputs.append(plot_packet_counts(aggs, out / "packet_counts.png"))
    _write_manifest(out, "simulate", argv, outputs)
    for a in aggs:
        print(f"n={a.n}: sent {a.sent_mean:.1f}, received {a.received_mean:.1f} +/- {a.received_std:.1f}")
    return EXIT_OK


def cmd_validate_radio(args, argv) -> int:
    config = load_scenario(args.config)
    v = config.validation
    radio = RadioConfig(v.range_km, config.radio.table, config.radio.link)
    points = validate_radio(radio, v.distances_km, v.packets, v.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["distance_km,expected_per,observed_per"]
    lines += [f"{p.distance_km!r},{p.expected_per!r},{p.observed_per!r}" for p in points]
    text = "\n".join(lines) + "\n"
    outputs = [_write(out / "radio_validation.csv", text)]
    if not args.no_plots:
        from .plotting import plot_radio_validation

        outputs.append(plot_radio_validation(points, out / "per_vs_distance.png"))
    _write_manifest(out, "validate-radio", argv, outputs)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_gen_traces(args, argv) -> int:
    config = load_scenario(args.config)
    n = args.n if args.n is not None else max(config.user_counts, default=0)
    rng = RngStream(config.base_seed, "tracegen")
    trace = generate_synthetic_flights(n, config.oca, config.flights, rng, config.sim_end)
    manifest = write_trace_set(args.out, trace, config.oca)
    print(f"wrote {n} flights; manifest {manifest}")
    return EXIT_OK


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return "none"
    if math.isinf(x):
        return "inf"
    return repr(x)


def cmd_linkbudget(args, argv) -> int:
    link_keys = {k for k in SCHEMA if k.startswith("link.")}
    if args.params:
        doc = load_document(args.params, allowed=link_keys)
    else:
        from .config import parse_config_text

        doc = parse_config_text("")
    params = dataclasses.replace(link_params(doc), f=args.f)
    horizon = radio_horizon_km(args.htx, args.hrx)
    loss = fspl_db(args.d, args.f, args.htx, args.hrx)
    p_rx = received_power_dbm(params, loss)
    snr = None if p_rx is None else snr_db(params, p_rx)
    print("d_km,f_mhz,horizon_km,fspl_db,p_rx_dbm,snr_db")
    print(",".join(_fmt(v) for v in (args.d, args.f, horizon, loss, p_rx, snr)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aerosim", description="Trace-driven aeronautical ad-hoc network simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="run the OCA scenario sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, help="base seed; run r uses seed + r")
    p.add_argument("--out", default="results")
    p.add_argument("--packet-log", action="store_true", help="also write packets.csv")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate-radio", help="compare observed and table PER over distance")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_validate_radio)

    p = sub.add_parser("gen-traces", help="write synthetic mobility and message traces")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, help="number of flights (default: largest user count)")
    p.set_defaults(func=cmd_gen_traces)

    p = sub.add_parser("linkbudget", help="evaluate the link budget for one geometry")
    p.add_argument("--d", type=float, required=True, help="distance [km]")
    p.add_argument("--f", type=float, required=True, help="frequency [MHz]")
    p.add_argument("--htx", type=float, required=True, help="transmitter height [km]")
    p.add_argument("--hrx", type=float, required=True, help="receiver height [km]")
    p.add_argument("--params", help="config file with link.* keys")
    p.set_defaults(func=cmd_linkbudget)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, argv)
    except (ConfigError, ScenarioError, TracegenError, LinkBudgetError) as exc:
        print(f"aerosim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"aerosim: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
