"""laxkit command line: verify, charges, simulate, monodromy, climit.

Exit codes: 0 pass, 1 check failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
import time

from .. import __version__
from .. import expr as ex
from . import commands
from .config import ConfigError, load_config
from .output import jsonable, render

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _jobs(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration file")
    common.add_argument("--out", help="output path (default: [output] path, else stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default: [output] format, else csv)")
    common.add_argument("--seed", type=_u64, help="64-bit seed, overrides [run] seed")
    common.add_argument("--jobs", type=_jobs, default=1, help="worker threads for sample sweeps")
    p = argparse.ArgumentParser(prog="laxkit", description="Lax pair and r-matrix checks for integrable models")
    p.add_argument("--version", action="version", version=f"laxkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a residual check suite")
    v.add_argument("check", help=", ".join(commands.CHECKS))
    sub.add_parser("charges", parents=[common], help="closed-form vs series-extracted charges")
    sub.add_parser("simulate", parents=[common], help="time evolution with charge and tr T monitoring")
    sub.add_parser("monodromy", parents=[common], help="tr T over a grid of spectral parameters")
    sub.add_parser("climit", parents=[common], help="discrete to continuum convergence tables")
    return p


def _dispatch(args, cfg, seed):
    if args.command == "verify":
        return commands.cmd_verify(cfg, args.check, seed, args.jobs)
    fn = {"charges": commands.cmd_charges, "simulate": commands.cmd_simulate,
          "monodromy": commands.cmd_monodromy, "climit": commands.cmd_climit}[args.command]
    return fn(cfg, seed, args.jobs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        seed = cfg.seed(args.seed)
        fmt = args.format or cfg.get("output", "format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"[output] format = {fmt!r}; use csv or json")
        out = args.out or cfg.get("output", "path")
        table, failed = _dispatch(args, cfg, seed)
    except (ConfigError, ex.ParseError, ex.EvalError) as err:
        print(f"laxkit: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(table, fmt)
    manifest = {
        "config_sha256": cfg.sha256,
        "seed": seed,
        "version": __version__,
        "started_at": started,
        "elapsed_s": round(time.perf_counter() - t0, 6),
        "results": {"command": args.command, "status": "fail" if failed else "pass", "output": out,
                    "format": fmt, "summary": table.get("summary", {})},
    }
    mtext = json.dumps(jsonable(manifest), indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(mtext)
    else:
        sys.stdout.write(text)
        sys.stderr.write(mtext)
    if args.command == "verify":
        s = table["summary"]
        print(f"{s['check']}: max residual {s['max']!r} (tolerance {s['tolerance']!r}) -> "
              f"{'PASS' if s['pass'] else 'FAIL'}", file=sys.stderr if not out else sys.stdout)
    return EXIT_FAIL if failed else EXIT_OK
