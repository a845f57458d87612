"""Command-line entry point.

Subcommands: ``sweep`` runs a Monte Carlo sweep and writes CSV plus a JSON
sidecar, ``trial`` runs a single trial verbosely, ``validate-config`` checks
a configuration without computing anything. Exit codes: 0 success, 1 runtime
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import importlib.resources
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    ScenarioConfig,
    apply_overrides,
    emit_csv,
    load_config,
    parse_config_text,
    run_sweep,
    run_trial,
)

__all__ = ["run_cli", "main", "resolve_config_path"]


def resolve_config_path(name: str):
    """Resolve a config argument: an existing path wins, else a shipped preset."""
    path = Path(name)
    if path.exists():
        return path
    preset = importlib.resources.files("mmwhybrid") / "presets" / name
    if preset.is_file():
        return preset
    raise ConfigError(f"config {name!r} is neither a file nor a shipped preset")


def _load(args) -> ScenarioConfig:
    if args.config is None:
        config = ScenarioConfig()
    else:
        resolved = resolve_config_path(args.config)
        if isinstance(resolved, Path):
            config = load_config(resolved)
        else:
            config = parse_config_text(resolved.read_text())
    overrides = list(args.set or [])
    if getattr(args, "trials", None) is not None:
        overrides.append(f"trials={args.trials}")
    if getattr(args, "mode", None) is not None:
        overrides.append(f"mode={args.mode}")
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    config = apply_overrides(config, overrides)
    config.validate()
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwhybrid",
        description="Hybrid beamforming link simulator for wideband MIMO-OFDM")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="config file path or shipped preset name")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config field (repeatable)")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--trials", type=int, help="override the trial count")
        p.add_argument("--mode", help="override the mode list (comma separated)")

    sweep = sub.add_parser("sweep", help="run a Monte Carlo sweep and write CSV")
    add_common(sweep)
    sweep.add_argument("--out", required=True, help="output CSV path")

    trial = sub.add_parser("trial", help="run one trial verbosely")
    add_common(trial)

    check = sub.add_parser("validate-config", help="validate a config and exit")
    add_common(check)
    return parser


def _cmd_sweep(args) -> int:
    config = _load(args)
    result = run_sweep(config)
    emit_csv(result, args.out)
    print(f"wrote {args.out} ({len(result.records)} records) "
          f"and {args.out}.meta.json")
    return 0


def _cmd_trial(args) -> int:
    config = _load(args)
    snr = config.snr_grid_dB[0]
    outcome = run_trial(config, snr, 0)
    print(f"trial 0 at {snr:g} dB (seed {config.seed})")
    for mode in config.mode:
        print(f"mode={mode}")
        if mode in outcome.traces:
            trace = outcome.traces[mode]
            for it, (w_idx, f_idx) in enumerate(trace, start=1):
                tail = ""
                if it == len(trace) and outcome.converged[mode]:
                    tail = "  (converged)"
                print(f"  iteration {it}: combiner={list(w_idx)} "
                      f"precoder={list(f_idx)}{tail}")
            if not outcome.converged[mode]:
                print("  (iteration cap reached without a fixed point)")
        print(f"  mean rate: {outcome.rates[mode]:.4f} bits/s/Hz")
    return 0


def _cmd_validate(args) -> int:
    _load(args)
    print("config OK")
    return 0


_COMMANDS = {"sweep": _cmd_sweep, "trial": _cmd_trial,
             "validate-config": _cmd_validate}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: name the context, exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
