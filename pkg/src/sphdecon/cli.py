"""Command-line driver for the simulation experiments.

    sphdecon example1 --preset table1 --seed 0 --reps 20 --out results/
    sphdecon example2 --preset ex2-pi8 --seed 0 --out results/
    sphdecon estimate --observations obs.csv --noise a=0.3927 --kappa0 0.43 \
        --m 1.2732 --out results/

Configuration may also come from a flat key=value text file (--config); flags
override file values. Exit codes: 0 success, 2 configuration error, 3
observation/noise file parse error, 4 numerical failure.
"""

import argparse
import math
import sys
from dataclasses import replace

from .experiments import (
    ConfigError,
    ExperimentConfig,
    ObservationParseError,
    PRESETS,
    preset_config,
    run_estimate,
    run_example1,
    run_example2,
)
from .noise import IllConditionedDegreeError


def _parse_noise(text):
    """Parse 'a=<radians>'; accepts plain 'pi/8'-style fractions for a."""
    if not text.startswith("a="):
        raise ConfigError(f"noise spec must look like 'a=<radians>', got {text!r}")
    expr = text[2:].strip()
    try:
        allowed = {"pi": math.pi}
        value = float(eval(expr, {"__builtins__": {}}, allowed))  # noqa: S307
    except Exception:
        raise ConfigError(f"cannot parse noise angle {expr!r}")
    return value


def _load_config_file(path):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {line_no}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
    return values


_CONFIG_KEYS = {
    "target": str,
    "noise_a": float,
    "n": int,
    "kappa0": lambda s: tuple(float(v) for v in s.split(",")),
    "j": int,
    "m": float,
    "seed": int,
    "reps": int,
    "empirical_noise": lambda s: s.lower() in ("1", "true", "yes"),
    "l_max": int,
    "out": str,
}

_FIELD_OF = {
    "n": "N", "j": "J", "m": "M", "reps": "repetitions",
    "empirical_noise": "use_empirical_noise", "out": "out_dir",
}


def _apply_config_file(config, values):
    for key, raw in values.items():
        k = key.lower()
        if k not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        config = replace(config, **{_FIELD_OF.get(k, k): _CONFIG_KEYS[k](raw)})
    return config


def _build_config(args, default_target):
    if args.preset:
        config = preset_config(args.preset)
    else:
        config = ExperimentConfig(target=default_target)
    if args.config:
        config = _apply_config_file(config, _load_config_file(args.config))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.n is not None:
        overrides["N"] = args.n
    if args.kappa0 is not None:
        overrides["kappa0"] = tuple(float(v) for v in args.kappa0.split(","))
    if args.noise is not None:
        overrides["noise_a"] = _parse_noise(args.noise)
    if args.empirical_noise:
        overrides["use_empirical_noise"] = True
    if args.analytic_noise:
        overrides["use_empirical_noise"] = False
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.reps is not None:
        overrides["repetitions"] = args.reps
    if args.j is not None:
        overrides["J"] = args.j
    if args.m is not None:
        overrides["M"] = args.m
    return replace(config, **overrides)


def _add_common(parser):
    parser.add_argument("--preset", choices=sorted(PRESETS), default=None)
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--n", type=int, default=None, help="sample size")
    parser.add_argument("--kappa0", default=None, help="threshold multiplier(s), comma separated")
    parser.add_argument("--noise", default=None, help="noise spec 'a=<radians>' (e.g. a=pi/8)")
    parser.add_argument("--empirical-noise", action="store_true", dest="empirical_noise")
    parser.add_argument("--analytic-noise", action="store_true", dest="analytic_noise")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--reps", type=int, default=None)
    parser.add_argument("--j", type=int, default=None, help="max needlet level override")
    parser.add_argument("--m", type=float, default=None, help="sup-norm bound")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="sphdecon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p1 = sub.add_parser("example1", help="uniform-target survivor-count tables")
    _add_common(p1)
    p2 = sub.add_parser("example2", help="bump-target peak recovery")
    _add_common(p2)
    p3 = sub.add_parser("estimate", help="run the estimator on an observations file")
    _add_common(p3)
    p3.add_argument("--observations", required=True)
    p3.add_argument("--noise-samples", default=None,
                    help="CSV of retained noise rotation angles (phi,theta,psi)")
    args = parser.parse_args(argv)

    try:
        if args.command == "example1":
            config = _build_config(args, "uniform")
            counts = run_example1(config)
            for k, arr in counts.items():
                mean = arr.mean(axis=0)
                print(f"kappa0={k}: mean survivors per level {list(mean)}")
        elif args.command == "example2":
            config = _build_config(args, "bump")
            report = run_example2(config)
            print(
                f"colatitude within 0.2 rad: {report['frac_colat_within_0.2']:.2f}; "
                f"geodesic within 0.2 rad: {report['frac_geodesic_within_0.2']:.2f}"
            )
        else:
            config = _build_config(args, "bump")
            exp = run_estimate(config, args.observations, args.noise_samples)
            counts = exp.survival_counts()
            print(f"survivors per level: {list(counts)}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ObservationParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except IllConditionedDegreeError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
