"""Command line interface: ``fraclab run | verify | list``.

Configuration files are INI files read with :mod:`configparser`::

    [run]
    experiments = torsion, gamma-beta
    output = results
    seed = 0
    workers = 1

    [defaults]
    s = 0.25 0.5 0.75

    [torsion]
    N = 1024

``[defaults]`` applies to every experiment; a section named after an
experiment overrides it. Values are converted to the type of the
experiment's default: lists are whitespace or comma separated, ``pairs``
are written ``s:beta``, list-of-string values (``data``) are ``;``
separated and ``none`` clears an optional number.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigurationError
from .experiments import BASE_DEFAULTS, REGISTRY, parse_data, run_experiment, write_outputs, write_summary
from .schrodinger import Potential

__all__ = ["main", "load_config", "coerce"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _float(text, key):
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigurationError(f"{key}: expected a number, got {text!r}") from exc


def coerce(key: str, text: str, default):
    """Convert a configuration string to the type of ``default``."""
    text = text.strip()
    if isinstance(default, list):
        if default and isinstance(default[0], str):
            return [t.strip() for t in text.split(";") if t.strip()]
        items = text.replace(",", " ").split()
        if default and isinstance(default[0], tuple):
            out = []
            for it in items:
                parts = it.split(":")
                if len(parts) != 2:
                    raise ConfigurationError(f"{key}: expected s:beta pairs, got {it!r}")
                out.append((_float(parts[0], key), _float(parts[1], key)))
            return out
        vals = [_float(t, key) for t in items]
        if default and all(isinstance(v, int) for v in default):
            if any(v != int(v) for v in vals):
                raise ConfigurationError(f"{key}: expected integers, got {text!r}")
            vals = [int(v) for v in vals]
        if not vals:
            raise ConfigurationError(f"{key}: empty list")
        return vals
    if isinstance(default, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        v = _float(text, key)
        if v != int(v):
            raise ConfigurationError(f"{key}: expected an integer, got {text!r}")
        return int(v)
    if isinstance(default, float) or default is None:
        return None if text.lower() == "none" else _float(text, key)
    return text


def validate(name: str, params: dict) -> dict:
    """Check an experiment's merged parameters before any solve."""
    p = dict(BASE_DEFAULTS)
    p.update(REGISTRY[name].defaults)
    p.update(params)
    s = p["s"] if isinstance(p["s"], list) else [p["s"]]
    if not s or any(not 0.0 < v < 1.0 for v in s):
        raise ConfigurationError(f"{name}: s values must lie in (0, 1), got {s}")
    if not (isinstance(p["N"], int) and p["N"] >= 4):
        raise ConfigurationError(f"{name}: N must be an integer >= 4")
    if p.get("q") is not None and not p["q"] >= 1.0:
        raise ConfigurationError(f"{name}: grading exponent q must be >= 1")
    if not (math.isfinite(p["R"]) and p["R"] > 0):
        raise ConfigurationError(f"{name}: R must be positive")
    if p["n"] != 1:
        raise ConfigurationError(f"{name}: only n = 1 grids are supported")
    Potential.parse(p["potential"])
    for spec in p.get("data", []):
        parse_data(spec)
    for k, v in p.items():
        if k.startswith("tol") and not (isinstance(v, (int, float)) and v >= 0):
            raise ConfigurationError(f"{name}: tolerance {k} must be a nonnegative number")
    return params


def load_config(path) -> tuple:
    """Parse a configuration file into ``(names, params_by_name, output, workers)``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    if not cp.has_section("run"):
        raise ConfigurationError("configuration needs a [run] section")
    run = cp["run"]
    names = [t.strip() for t in run.get("experiments", "").replace(",", " ").split() if t.strip()]
    if not names:
        raise ConfigurationError("empty experiment list")
    bad = [n for n in names if n not in REGISTRY]
    if bad:
        raise ConfigurationError(f"unknown experiments {bad}; valid names: {', '.join(REGISTRY)}")
    extra = set(cp.sections()) - {"run", "defaults"} - set(REGISTRY)
    if extra:
        raise ConfigurationError(f"unknown sections {sorted(extra)}")
    output = run.get("output", "results")
    workers = coerce("workers", run.get("workers", "1"), 1)
    seed = coerce("seed", run.get("seed", "0"), 0)
    unknown = set(run) - {"experiments", "output", "workers", "seed"}
    if unknown:
        raise ConfigurationError(f"unknown keys in [run]: {sorted(unknown)}")
    params = {}
    for name in names:
        defaults = dict(BASE_DEFAULTS)
        defaults.update(REGISTRY[name].defaults)
        p = {"seed": seed}
        for section in ("defaults", name):
            if not cp.has_section(section):
                continue
            for key, text in cp[section].items():
                if key not in defaults:
                    if section == "defaults":
                        continue
                    raise ConfigurationError(f"[{name}] unknown key {key!r}; known: {sorted(defaults)}")
                p[key] = coerce(key, text, defaults[key])
        params[name] = validate(name, p)
    return names, params, output, max(int(workers), 1)


def _run_one(args):
    name, params = args
    return run_experiment(name, params)


def execute(names, params, output, workers=1, stream=None) -> int:
    """Run experiments, collect outputs in registry order and report."""
    stream = stream or sys.stdout
    jobs = [(n, params.get(n, {})) for n in names]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    status = EXIT_OK
    for res in results:
        paths = write_outputs(res, output)
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name} ({len(res.checks)} checks)", file=stream)
        if not res.passed:
            status = EXIT_FAIL
            for c in res.failed():
                print(f"  failed: {c.label}: {c.value:.6g} {c.relation} {c.threshold:.6g}", file=stream)
            csvs = [p for p in paths if p.suffix == ".csv"]
            print(f"  table: {csvs[0] if csvs else output}", file=stream)
    print(f"summary: {write_summary(results, output)}", file=stream)
    return status


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fraclab", description="Fractional Dirichlet experiments")
    sub = ap.add_subparsers(dest="command")
    r = sub.add_parser("run", help="run the experiments named in a configuration file")
    r.add_argument("config")
    v = sub.add_parser("verify", help="run one experiment with command line overrides")
    v.add_argument("name")
    v.add_argument("--s", type=float, nargs="+")
    v.add_argument("--N", type=int)
    v.add_argument("--q", type=float)
    v.add_argument("--R", type=float)
    v.add_argument("--beta", type=float)
    v.add_argument("--potential")
    v.add_argument("--seed", type=int)
    v.add_argument("--out", default="results")
    sub.add_parser("list", help="print the experiment names")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "list":
        print("\n".join(REGISTRY))
        return EXIT_OK
    try:
        if args.command == "run":
            names, params, output, workers = load_config(args.config)
        else:
            if args.name not in REGISTRY:
                raise ConfigurationError(f"unknown experiment {args.name!r}; valid names: {', '.join(REGISTRY)}")
            names, output, workers = [args.name], args.out, 1
            p = {k: getattr(args, k) for k in ("s", "N", "q", "R", "potential", "seed")
                 if getattr(args, k) is not None}
            if args.beta is not None:
                if args.name != "gamma-beta":
                    raise ConfigurationError("--beta applies to gamma-beta only")
                p["beta"] = args.beta
            params = {args.name: validate(args.name, p)}
    except ConfigurationError as exc:
        print(f"fraclab: error: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    return execute(names, params, output, workers)


if __name__ == "__main__":
    sys.exit(main())
