"""Command-line entry point: ``spontaneous-qrng <command> [options]``.

Commands: randomness, sweep, verify, simulate, extract.  Settings resolve as
command-line flags > ``--config`` JSON file > built-in defaults, and unknown
config keys are rejected.  Every file is written to a temporary sibling and
renamed into place, so failed runs leave no partial output.

Exit codes: 0 success, 2 invalid input (error JSON on stderr), 3 a
verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__, experiments, extract, schemes, simulate
from .errors import InvalidParams, QRNGError
from .schemes import Adversary, PhaseFluct, SinglePhoton, Temporal, table_i_dispatch
from .states import QubitDensity

EXIT_INVALID = 2
EXIT_VERIFY_FAILED = 3
EXTRACT_SEED_STREAM = 3

SCHEME_FLAGS = {
    "scheme": "scheme",
    "gamma_t": "gamma_t",
    "n_bins": "n_bins",
    "click_probs": "click_probs",
    "a": "a",
    "power": "P",
    "tau_c": "tau_c",
    "a_param": "A_param",
    "tau": "tau",
}
STATE_FLAGS = ("rho11", "re_rho01", "im_rho01")

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "out": "-",
    "format": None,
    "adversary": "II",
    # sweep
    "n_list": list(experiments.DEFAULT_N_LIST),
    "coherence": None,
    "coherence_points": 21,
    # verify
    "suite": "all",
    "budget": None,
    # simulate
    "count": 100_000,
    "sigma": None,
    # extract
    "events_csv": None,
    "raw": None,
    "raw_bits": None,
    "epsilon": 2.0**-64,
    "plan_out": None,
}
CONFIG_KEYS = set(DEFAULTS) | {"scheme", "state"}


class CLIError(QRNGError):
    pass


# --------------------------------------------------------------------------
# output helpers


def atomic_write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n").encode()


def render_csv(header: Sequence[str], rows, metadata: dict[str, Any]) -> bytes:
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}: {json.dumps(metadata[key], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode()


def read_csv_rows(path: str) -> tuple[dict[str, Any], list[dict[str, str]]]:
    meta: dict[str, Any] = {}
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = json.loads(value)
            else:
                lines.append(line)
    return meta, list(csv.DictReader(lines))


# --------------------------------------------------------------------------
# configuration


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags override it)")
    common.add_argument("--seed", type=_u64, help="unsigned 64-bit seed")
    common.add_argument("--out", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"))

    scheme = common.add_argument_group("scheme")
    scheme.add_argument("--scheme", choices=sorted(schemes.SCHEMES))
    scheme.add_argument("--gamma-t", type=float, help="decay rate times window length")
    scheme.add_argument("--n-bins", type=int)
    scheme.add_argument("--click-probs", type=_parse_float_list, help="comma-separated")
    scheme.add_argument("--a", type=float, help="voltage-interval width")
    scheme.add_argument("--power", type=float, help="laser output power P")
    scheme.add_argument("--tau-c", type=float, help="coherence time")
    scheme.add_argument("--a-param", type=float, help="the constant A in the interval scale")
    scheme.add_argument("--tau", type=float, help="interferometer delay")
    scheme.add_argument("--rho11", type=float)
    scheme.add_argument("--re-rho01", type=float)
    scheme.add_argument("--im-rho01", type=float)
    scheme.add_argument("--adversary", choices=("I", "II"))

    parser = argparse.ArgumentParser(prog="spontaneous-qrng", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("randomness", parents=[common], help="randomness report for one scheme")

    p = sub.add_parser("sweep", parents=[common], help="coherence sweep at rho00 = rho11 = 1/2")
    p.add_argument("--n-list", type=_parse_int_list, help="comma-separated bin counts")
    p.add_argument("--coherence", type=_parse_float_list, help="explicit l1 coherence grid")
    p.add_argument("--coherence-points", type=int, help="evenly spaced points on [0, 1]")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=(*experiments.SUITES, "all"))
    p.add_argument("--budget", type=int, help="random cases (oracle, prop1) or samples (limits, channel)")

    p = sub.add_parser("simulate", parents=[common], help="sample detection events or phase voltages")
    p.add_argument("--count", type=int)
    p.add_argument("--sigma", type=float, help="phase-increment standard deviation")

    p = sub.add_parser("extract", parents=[common], help="size and run a Toeplitz extractor")
    p.add_argument("--events-csv", help="event file written by 'simulate'")
    p.add_argument("--raw", help="packed raw-bit file (little-endian within bytes)")
    p.add_argument("--raw-bits", type=int, help="number of valid bits in --raw")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--plan-out", help="where to write the extraction plan JSON")
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    cfg: dict[str, Any] = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise CLIError("config file must hold a JSON object")
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise CLIError(f"unknown config keys: {sorted(unknown)}")

    settings = dict(DEFAULTS)
    settings.update({k: v for k, v in cfg.items() if k not in ("scheme", "state")})
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value

    scheme = dict(cfg.get("scheme") or {})
    for flag, key in SCHEME_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            scheme[key] = value
    settings["scheme"] = scheme or None

    state = dict(cfg.get("state") or {})
    for key in STATE_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            state[key] = value
    settings["state"] = state or None
    settings["adversary"] = Adversary.parse(settings["adversary"])
    return settings


def _scheme(settings) -> schemes.SchemeParams:
    if not settings["scheme"]:
        raise CLIError("no scheme given (use --scheme or a 'scheme' config entry)")
    return schemes.scheme_from_json(settings["scheme"])


def _state(settings) -> Optional[QubitDensity]:
    return QubitDensity.from_json(settings["state"]) if settings["state"] else None


def _metadata(command: str, settings: dict[str, Any], **extra) -> dict[str, Any]:
    meta = {"command": command, "seed": settings["seed"], "version": __version__}
    if settings["scheme"]:
        meta["scheme"] = settings["scheme"]
    if settings["state"]:
        meta["state"] = settings["state"]
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands


def cmd_randomness(settings) -> int:
    report = table_i_dispatch(_scheme(settings), settings["adversary"], _state(settings))
    if settings["format"] == "csv":
        row = [
            report.scheme,
            report.adversary.value,
            "" if report.exact_bits is None or report.unbounded else repr(report.exact_bits),
            "" if report.unbounded else repr(report.lower_bound_bits),
            str(report.unbounded).lower(),
            " ".join(repr(p) for p in report.outcome_probs),
            report.notes,
        ]
        header = ["scheme", "adversary", "exact_bits", "lower_bound_bits", "unbounded",
                  "outcome_probs", "notes"]
        data = render_csv(header, [row], _metadata("randomness", settings))
    else:
        data = dump_json(report.to_json())
    atomic_write(settings["out"], data)
    return 0


def cmd_sweep(settings) -> int:
    scheme = settings["scheme"] or {}
    unknown = set(scheme) - {"scheme", "gamma_t"}
    if unknown or scheme.get("scheme", "temporal") != "temporal":
        raise CLIError("sweep only takes a temporal scheme with --gamma-t")
    gamma_t = float(scheme.get("gamma_t", experiments.DEFAULT_SWEEP_GAMMA_T))
    coherences = settings["coherence"]
    if coherences is None:
        points = int(settings["coherence_points"])
        if points < 2:
            raise CLIError("coherence_points must be >= 2")
        coherences = np.linspace(0.0, 1.0, points).tolist()
    rows = experiments.coherence_sweep(gamma_t, settings["n_list"], coherences)
    header = ["n_bins", "l1_coherence", "exact_bits", "lower_bound_bits"]
    if settings["format"] == "json":
        data = dump_json({
            "gamma_t": gamma_t,
            "rows": [dict(zip(header, (r.n_bins, r.l1_coherence, r.exact_bits, r.lower_bound_bits)))
                     for r in rows],
        })
    else:
        meta = _metadata("sweep", settings, gamma_t=gamma_t, rho00=0.5, rho11=0.5)
        data = render_csv(
            header,
            [[r.n_bins, repr(r.l1_coherence), repr(r.exact_bits), repr(r.lower_bound_bits)] for r in rows],
            meta,
        )
    atomic_write(settings["out"], data)
    return 0


def cmd_verify(settings) -> int:
    checks = experiments.run_suite(settings["suite"], settings["seed"], settings["budget"])
    header = ["suite", "name", "passed", "statistic", "threshold", "detail"]
    rows = [[c.suite, c.name, str(c.passed).lower(), repr(c.statistic), repr(c.threshold), c.detail]
            for c in checks]
    if settings["format"] == "json":
        data = dump_json([dict(zip(header, (c.suite, c.name, c.passed, c.statistic, c.threshold, c.detail)))
                          for c in checks])
    else:
        data = render_csv(header, rows, _metadata("verify", settings, suite=settings["suite"]))
    atomic_write(settings["out"], data)
    return 0 if all(c.passed for c in checks) else EXIT_VERIFY_FAILED


def cmd_simulate(settings) -> int:
    count = int(settings["count"])
    if count < 1:
        raise CLIError("count must be >= 1")
    seed = settings["seed"]
    if settings["format"] == "json":
        raise CLIError("simulate writes CSV only")

    if settings["sigma"] is not None or (settings["scheme"] or {}).get("scheme") == "phase_fluct":
        if settings["sigma"] is None:
            raise CLIError("phase sampling needs --sigma")
        volts = simulate.sample_phase_voltages(float(settings["sigma"]), count, seed)
        meta = _metadata("simulate", settings, kind="phase_voltage", sigma=settings["sigma"], count=count)
        data = render_csv(["voltage"], ([repr(float(v))] for v in volts), meta)
        atomic_write(settings["out"], data)
        return 0

    params = _scheme(settings)
    if isinstance(params, SinglePhoton):
        params = Temporal(params.gamma_t, 1)
    if not isinstance(params, Temporal):
        raise CLIError("event simulation needs a single_photon or temporal scheme")
    state = _state(settings)
    if state is None:
        raise CLIError("event simulation needs --rho11")
    batch = simulate.sample_temporal_events(state.rho11, params, count, seed)
    meta = _metadata("simulate", settings, kind="temporal_events", n_bins=params.n_bins, count=count)
    rows = zip(batch.atom_index.tolist(), batch.outcomes.tolist(), [batch.seed_stream] * count)
    atomic_write(settings["out"], render_csv(["atom_index", "outcome", "seed_stream"], rows, meta))
    return 0


def _seed_bits(seed: int, count: int) -> np.ndarray:
    words = simulate.philox(seed, EXTRACT_SEED_STREAM).random_raw((count + 63) // 64)
    bits = ((words[:, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)
    return bits.ravel()[:count]


def cmd_extract(settings) -> int:
    if settings["out"] == "-":
        raise CLIError("extract writes binary output; give --out")
    if (settings["events_csv"] is None) == (settings["raw"] is None):
        raise CLIError("give exactly one of --events-csv or --raw")

    if settings["events_csv"]:
        meta, rows = read_csv_rows(settings["events_csv"])
        if not rows:
            raise CLIError("event file is empty")
        if settings["scheme"] is None and "scheme" in meta:
            settings["scheme"] = meta["scheme"]
        if settings["state"] is None and "state" in meta:
            settings["state"] = meta["state"]
        outcomes = np.array([int(r["outcome"]) for r in rows])
        n_outcomes = int(meta.get("n_bins", outcomes.max())) + 1
        raw = extract.encode_outcomes(outcomes, n_outcomes)
        events = len(outcomes)
        source = {"events_csv": os.path.basename(settings["events_csv"])}
    else:
        if settings["raw_bits"] is None:
            raise CLIError("--raw needs --raw-bits (the event count is taken as the bit count)")
        raw = extract.unpack_bits(Path(settings["raw"]).read_bytes(), int(settings["raw_bits"]))
        events = len(raw)
        source = {"raw": os.path.basename(settings["raw"])}

    report = table_i_dispatch(_scheme(settings), settings["adversary"], _state(settings))
    plan = extract.plan_extraction(report, events, float(settings["epsilon"]))
    seed_bits = _seed_bits(settings["seed"], len(raw) + plan.output_len - 1)
    out = extract.toeplitz_extract(raw, plan, seed_bits)

    plan_path = settings["plan_out"] or settings["out"] + ".plan.json"
    plan_doc = {
        "plan": plan.to_json(),
        "raw_bits": int(len(raw)),
        "report": report.to_json(),
        "seed": settings["seed"],
        "bit_order": "little-endian within bytes",
        **source,
    }
    atomic_write(settings["out"], extract.pack_bits(out))
    atomic_write(plan_path, dump_json(plan_doc))
    return 0


COMMANDS = {
    "randomness": cmd_randomness,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "extract": cmd_extract,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = resolve(args)
        return COMMANDS[args.command](settings)
    except (QRNGError, ValueError, OSError, KeyError, TypeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
