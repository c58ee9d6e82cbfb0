"""Command-line entry point.

    catgen simulate --preset NAME | --config FILE [--sweep k=v1,v2,...] [--out DIR]
                    [--workers N] [--step S] [--truncation N_D]
    catgen list-presets

Exit codes: 0 success, 2 usage error, 3 numeric-invariant violation.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .errors import InvariantViolation
from .presets import PRESETS, preset_names, resolve_params, resolve_time
from .runner import RunConfig, run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3


class UsageError(ValueError):
    pass


def parse_value(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_list(text: str) -> list:
    items = [t for t in (s.strip() for s in text.split(",")) if t]
    if not items:
        raise UsageError(f"empty value list {text!r}")
    values = [parse_value(t) for t in items]
    return [float(v) if isinstance(v, int) else v for v in values]


def parse_sweep(items) -> dict:
    sweep = {}
    for item in items or ():
        key, sep, values = item.partition("=")
        if not sep:
            raise UsageError(f"--sweep expects key=v1,v2,... (got {item!r})")
        sweep[key.strip()] = parse_list(values)
    return sweep


def load_config(path: Path) -> dict:
    """Read an INI file with [system], [integrator], [sweep] and [output] sections."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path}")
    known = {"system", "integrator", "sweep", "output"}
    extra = sorted(set(cp.sections()) - known)
    if extra:
        raise UsageError(f"unknown config section(s) {extra}; expected {sorted(known)}")
    out = {"overrides": {}, "sweep": {}}
    if cp.has_section("system"):
        for k, v in cp.items("system"):
            if k == "preset":
                out["preset"] = v.strip()
            elif k == "kind":
                out["kind"] = v.strip()
            else:
                out["overrides"][k] = parse_value(v)
    if cp.has_section("integrator"):
        for k, v in cp.items("integrator"):
            if k in ("step", "sample_interval"):
                out[k] = float(v)
            elif k in ("truncation", "n_d"):
                out["truncation"] = int(v)
            elif k == "step_divisor":
                out["step_divisor"] = int(v)
            elif k == "t_end":
                out["t_end"] = parse_value(v)
            else:
                raise UsageError(f"unknown [integrator] key {k!r}")
    if cp.has_section("sweep"):
        for k, v in cp.items("sweep"):
            out["sweep"][k] = parse_list(v)
    if cp.has_section("output"):
        for k, v in cp.items("output"):
            if k == "out":
                out["out"] = Path(v.strip())
            elif k == "workers":
                out["workers"] = int(v)
            elif k == "observables":
                out["observables"] = tuple(s.strip() for s in v.split(",") if s.strip())
            else:
                raise UsageError(f"unknown [output] key {k!r}")
    if not out["sweep"]:
        del out["sweep"]
    return out


def build_config(args) -> RunConfig:
    settings = load_config(Path(args.config)) if args.config else {"overrides": {}}
    if args.preset:
        settings["preset"] = args.preset
    if "preset" not in settings and "kind" not in settings:
        raise UsageError("give --preset NAME or a config file with a preset or kind")
    if args.sweep:
        settings["sweep"] = parse_sweep(args.sweep)
    for key in ("out", "workers", "step", "truncation"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = Path(value) if key == "out" else value
    return RunConfig(**settings)


def list_presets(stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    for name in preset_names():
        p = PRESETS[name]
        params = resolve_params(p.values())
        t_end = resolve_time(p.t_end, params)
        fields = ", ".join(
            f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.as_dict().items()
        )
        stream.write(f"{name}  [{p.kind}]  {p.description}\n")
        stream.write(f"    {fields}, t_end={t_end:.6g}\n")
        if p.sweep:
            sweep = "; ".join(f"{k}={','.join(f'{x:g}' for x in v)}" for k, v in p.sweep.items())
            stream.write(f"    sweep: {sweep}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catgen", description="Driven qubit-oscillator cat-state simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a preset or a config file")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset name (see list-presets)")
    src.add_argument("--config", help="INI file with [system], [integrator], [sweep], [output]")
    sim.add_argument("--sweep", action="append", metavar="K=V1,V2", help="sweep axis; repeatable")
    sim.add_argument("--out", help="output directory (default: out)")
    sim.add_argument("--workers", type=int, help="parallel sweep workers")
    sim.add_argument("--step", type=float, help="integrator step in units of 1/g_0")
    sim.add_argument("--truncation", type=int, help="Fock truncation n_d")
    sub.add_parser("list-presets", help="print the preset catalogue")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "list-presets":
        list_presets()
        return EXIT_OK
    try:
        config = build_config(args)
        result = run(config)
    except (UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"catgen: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"catgen: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if not result.ok:
        for entry in result.manifest["points"]:
            if entry["status"] != "ok":
                print(f"catgen: invariant violation at {entry['label'] or 'run'}: {entry['error']}",
                      file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
