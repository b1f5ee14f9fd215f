"""Command line front end.

Every subcommand takes ``--config`` pointing at a model config JSON file
(see docs/formats.md).  Tables go out as CSV, barcodes and complexes as JSON.
Exit codes: 0 success, 2 bad input, 3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import os
import sys
from typing import Iterable, Sequence

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from .chords import maslov_oracle, nontransverse_bands
from .filtered_complex import FilteredComplex, InvalidComplexError, reduce_to_barcode
from .floer import (DifferentialRule, FloerScenario, ModelInconsistencyError, Mode,
                    boundary_depth_scenario, build_complex)
from .local_model import ModelConfig, NonTransverseError
from .quasiflat import NUDGE, QuasiflatReport, random_pairs, sigma_map, sweep

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["n", "delta"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": math.pi},
        "d": {"type": "integer", "minimum": 1},
        "shells": {"type": "array", "items": {"type": "number"}, "minItems": 4},
        "sigma_mode": {"type": "boolean"},
        "iota": {"type": ["number", "null"]},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "ambient_offset": {
            "type": ["object", "null"],
            "required": ["r", "f"],
            "properties": {
                "r": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                "f": {"type": "array", "items": {"type": "number"}, "minItems": 2},
            },
        },
    },
}


RULES = [m.value for m in Mode]


class UsageError(Exception):
    pass


def load_config(path: str) -> ModelConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    error = best_match(Draft202012Validator(CONFIG_SCHEMA).iter_errors(data))
    if error is not None:
        where = "/".join(map(str, error.path)) or "<root>"
        raise UsageError(f"config {path}: {where}: {error.message}")
    if "d" not in data and "shells" not in data:
        raise UsageError(f"config {path}: needs 'd' or 'shells'")
    try:
        return ModelConfig.from_json(data)
    except ValueError as exc:
        raise UsageError(f"config {path}: {exc}") from exc


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


def band_vector(config: ModelConfig, v: np.ndarray, nudge: bool) -> np.ndarray:
    """Per-band coefficients; sigma layouts accept the short vector and double it."""
    if config.sigma_mode and v.size == config.dim:
        v = sigma_map(v)
    if v.size != config.d:
        raise UsageError(f"--v has {v.size} entries, config has {config.d} bands")
    bad = nontransverse_bands(v, config)
    if bad and not nudge:
        raise UsageError(f"--v is not transverse in band(s) {bad}; pass --nudge to perturb")
    while bad:
        for b in bad:
            v[b - 1] += NUDGE
        bad = nontransverse_bands(v, config)
    return v


@contextlib.contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with _output(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def write_json(path: str | None, data) -> None:
    with _output(path) as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HOFERLAB_THREADS", "1")))
    except ValueError:
        raise UsageError("HOFERLAB_THREADS must be an integer")


def _scenario(args, config: ModelConfig) -> FloerScenario:
    v = band_vector(config, parse_vector(args.v), args.nudge)
    return FloerScenario(config, v, args.i, args.k)


# subcommands --------------------------------------------------------------

def cmd_chords(args) -> None:
    config = load_config(args.config)
    scen = _scenario(args, config)
    rows = [(c.sector, c.s, c.m, c.branch, c.index, c.action, c.label) for c in scen.chords]
    write_csv(args.out, ["sector", "s", "m", "branch", "index", "action", "label"], rows)


def cmd_indices(args) -> None:
    config = load_config(args.config)
    scen = _scenario(args, config)
    rows = []
    for c in scen.chords:
        oracle = maslov_oracle(c, scen.i, scen.k, scen.v, config)
        rows.append((c.label, c.sector, c.region, c.index, oracle, c.index == oracle))
    write_csv(args.out, ["label", "sector", "region", "index", "oracle_index", "agree"], rows)
    if not all(r[-1] for r in rows):
        raise ModelInconsistencyError("closed-form index disagrees with the crossing count")


def cmd_barcode(args) -> None:
    if args.complex:
        try:
            with open(args.complex) as fh:
                C = FilteredComplex.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read complex {args.complex}: {exc}") from exc
    else:
        if args.config is None or args.v is None:
            raise UsageError("barcode needs --complex, or --config with --v")
        config = load_config(args.config)
        C = build_complex(_scenario(args, config), DifferentialRule.parse(args.rule, config.n))
        if args.emit_complex:
            write_json(args.emit_complex, C.to_json())
    try:
        B = reduce_to_barcode(C)
    except InvalidComplexError as exc:
        raise UsageError(f"invalid complex: {exc}") from exc
    write_json(args.out, B.to_json())


def _reports(args) -> list[QuasiflatReport]:
    config = load_config(args.config)
    pairs = random_pairs(args.seed, args.pairs, config.dim, args.bound)
    return sweep(config, pairs, threads=_threads())


def cmd_quasiflat(args) -> None:
    reports = _reports(args)
    fields = list(QuasiflatReport.__dataclass_fields__)
    write_csv(args.out, fields, ([r.row()[f] for f in fields] for r in reports))


def cmd_sweep(args) -> None:
    reports = _reports(args)
    write_csv(args.out, ["inf_norm", "lower", "upper_sigma"],
              ((r.exact_inf_norm, r.lower, r.upper_sigma) for r in reports))


def cmd_boundary_depth(args) -> None:
    config = load_config(args.config)
    rule = DifferentialRule.parse(args.rule, config.n)
    rows = []
    for k in range(args.kmin, args.kmax + 1):
        beta, lower = boundary_depth_scenario(k, args.ell, config, rule)
        rows.append((k, beta, lower))
    write_csv(args.out, ["k", "beta", "lower_bound"], rows)


def cmd_selftest(args) -> None:
    from .selftest import run

    if not run(stream=sys.stdout):
        raise ModelInconsistencyError("selftest failed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoferlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p, required=True):
        p.add_argument("--config", required=required)
        p.add_argument("--i", type=int, default=0, help="twist index")
        p.add_argument("--k", type=int, default=1, help="twist power (0 for no twist)")
        p.add_argument("--v", required=required, help="comma separated coefficients")
        p.add_argument("--nudge", action="store_true", help="perturb a non-transverse --v")
        p.add_argument("--out", default=None)

    p = sub.add_parser("chords", help="CSV of all chords of a scenario")
    scenario_flags(p)
    p.set_defaults(func=cmd_chords)

    p = sub.add_parser("indices", help="closed-form gradings next to the crossing count")
    scenario_flags(p)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("barcode", help="barcode JSON of a scenario or of a complex file")
    scenario_flags(p, required=False)
    p.add_argument("--complex", help="complex JSON file to reduce instead of a scenario")
    p.add_argument("--rule", choices=RULES, help="differential rule (default: by dimension)")
    p.add_argument("--emit-complex", help="also write the scenario complex JSON here")
    p.set_defaults(func=cmd_barcode)

    for name, func, text in (("quasiflat", cmd_quasiflat, "full report per random pair"),
                             ("sweep", cmd_sweep, "(inf_norm, lower, upper_sigma) per random pair")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--pairs", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bound", type=float, default=4.0, help="coordinates drawn from [-bound, bound]")
        p.add_argument("--out", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("boundary-depth", help="CSV of (k, beta, lower_bound)")
    p.add_argument("--config", required=True)
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--rule", choices=RULES, help="differential rule (default: by dimension)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_boundary_depth)

    p = sub.add_parser("selftest", help="quick invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (UsageError, NonTransverseError, ValueError) as exc:
        print(f"hoferlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except ModelInconsistencyError as exc:
        print(f"hoferlab {args.command}: internal inconsistency: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
