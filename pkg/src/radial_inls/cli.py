"""Command line entry point: radial-inls <verb> [--config PATH] [--out DIR] [--seed N] [--threads N]."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .errors import BracketError, ConfigError, NumericalFailure, PreconditionError, RegimeError
from .harness import (
    COMMANDS,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_REGIME,
    dumps,
    load_config,
    outcome_exit_code,
    parse_config,
    run,
    sweep,
)


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("threads must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radial-inls", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=_u64, help="seed for randomized suites")
    ap.add_argument("--threads", type=_positive, default=1, help="worker threads for sweep")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.config is not None:
            cfg = load_config(args.config, args.command)
        elif args.command == "verify":
            cfg = parse_config({"command": "verify"})
        else:
            raise ConfigError(f"'{args.command}' needs --config")
        over = {}
        if args.out is not None:
            over["out_dir"] = args.out
        if args.seed is not None:
            over["seed"] = args.seed
        if over:
            cfg = dataclasses.replace(cfg, **over)
        if cfg.command == "sweep":
            _, rep = sweep(cfg, threads=args.threads)
            sys.stdout.write(dumps(rep))
            return EXIT_OK
        summary = run(cfg)
        sys.stdout.write(dumps(summary.to_dict()))
        return outcome_exit_code(summary)
    except (ConfigError, PreconditionError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeError as e:
        print(f"regime violation: {e}", file=sys.stderr)
        return EXIT_REGIME
    except (NumericalFailure, BracketError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        # remaining input errors (invalid field values, degenerate data)
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
