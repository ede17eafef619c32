"""Command-line front end.

Every subcommand reads a JSON config (validated against a schema; errors
carry a JSON pointer), applies flag overrides, runs the matching study and
writes report files.  One ``key=value`` summary line goes to standard
output; failures print a JSON error record to standard error.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import jsonschema

from .errors import AnisoCSError, ConfigError, NotConverged, TooManyResamples
from .experiments import ExperimentConfig, emit_report, run_study

__all__ = ["CliInvocation", "UsageError", "CONFIG_SCHEMA", "SAMPLE_SCHEMA", "parse_args", "dispatch", "main"]

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2, 3

STUDY_OF = {
    "coherence": "coherence",
    "recover": "recover",
    "phase": "phase",
    "certificate": "certificate",
    "eit-demo": "eit_demo",
}
SUBCOMMANDS = (*STUDY_OF, "sample", "replacement-check")

_num = {"type": "number"}
_int_list = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "study": {"enum": list(STUDY_OF.values())},
        "grid_n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1, "maximum": 3},
        "sparsity": {"enum": ["dirac", "haar", "db2", "db3", "db4"]},
        "levels": {"type": ["integer", "null"], "minimum": 1},
        "measurement": {"enum": ["dft", "cgo", "identity"]},
        "lam": {"type": ["number", "null"], "minimum": 2},
        "cgo_decay": {"type": "number", "exclusiveMinimum": 0},
        "N": {"type": ["integer", "null"], "minimum": 1},
        "M": {"type": ["integer", "null"], "minimum": 1},
        "s": _int_list,
        "m": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "schemes": {"type": "array", "minItems": 1,
                    "items": {"enum": ["uniform", "variable_density", "bernoulli"]}},
        "weighting": {"enum": ["coherence", "power"]},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "epsilon": {"type": "number", "minimum": 0},
        "noise": {"type": "number", "minimum": 0},
        "success_threshold": {"type": "number", "exclusiveMinimum": 0},
        "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "delta_size": {"type": "integer", "minimum": 1},
        "max_total_resamples": {"type": ["integer", "null"], "minimum": 1},
        "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "C": _num,
        "C_prime": _num,
        "C_dprime": _num,
        "C1": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_iters": {"type": "integer", "minimum": 1},
                "tol_primal": {"type": "number", "exclusiveMinimum": 0},
                "tol_dual": {"type": "number", "exclusiveMinimum": 0},
                "step_ratio": {"type": "number", "exclusiveMinimum": 0},
                "norm_power_iters": {"type": "integer", "minimum": 1},
                "adaptive": {"type": "boolean"},
                "check_every": {"type": "integer", "minimum": 1},
                "raise_on_fail": {"type": "boolean"},
                "trace_path": {"type": ["string", "null"]},
                "trace_every": {"type": "integer", "minimum": 1},
            },
        },
        "jobs": {"type": "integer", "minimum": 1},
    },
}

SAMPLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["N", "m"],
    "properties": {
        "scheme": {"enum": ["uniform", "variable_density", "bernoulli"]},
        "N": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "theta": {"type": "number", "minimum": 0, "maximum": 1},
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "C1": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
    },
}


class UsageError(AnisoCSError):
    pass


@dataclass
class CliInvocation:
    subcommand: str
    config: dict = field(default_factory=dict)
    config_path: str | None = None
    output_dir: str = "anisocs-out"
    formats: tuple = ("json",)
    jobs: int = 1

    @property
    def study_tag(self):
        return STUDY_OF.get(self.subcommand)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    p = _Parser(prog="anisocs", description="Anisotropic compressed sensing experiments.")
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--out", metavar="DIR", default="anisocs-out")
        sp.add_argument("--seed", type=int, metavar="U64")
        sp.add_argument("--jobs", type=int, metavar="N")
        sp.add_argument("--format", action="append", choices=("json", "csv", "svg"), dest="formats")
    return p


def _pointer(path):
    return "/" + "/".join(str(p) for p in path) if path else ""


def _validate(doc, schema):
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(doc))
    if err is not None:
        raise ConfigError(err.message, _pointer(err.absolute_path))


def _available_cores():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def parse_args(argv) -> CliInvocation:
    """Parse and validate ``argv``; raises :class:`UsageError` or :class:`ConfigError`."""
    ns = _build_parser().parse_args(list(argv))
    name = ns.subcommand
    doc = {}
    if ns.config is not None:
        try:
            with open(ns.config) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {ns.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}", "") from None
    elif name != "replacement-check":
        raise UsageError(f"{name} requires --config PATH")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", "")
    if ns.seed is not None:
        if not 0 <= ns.seed < 2 ** 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        doc["seed"] = ns.seed
    jobs = ns.jobs if ns.jobs is not None else _available_cores()
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if name in STUDY_OF:
        if doc.setdefault("study", STUDY_OF[name]) != STUDY_OF[name]:
            raise ConfigError(f"study {doc['study']!r} does not match subcommand {name!r}", "/study")
        doc["jobs"] = jobs
        _validate(doc, CONFIG_SCHEMA)
        doc = ExperimentConfig.from_dict(doc).to_dict()
    elif name == "sample":
        _validate(doc, SAMPLE_SCHEMA)
    formats = tuple(ns.formats) if ns.formats else ("json",)
    return CliInvocation(name, doc, ns.config, ns.out, formats, jobs)


def _summary(pairs):
    return " ".join(f"{k}={_fmt(v)}" for k, v in pairs)


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _run_sample(inv: CliInvocation):
    import numpy as np

    from .sampling import bernoulli_mask, uniform_subset, variable_density

    c = inv.config
    scheme, N, m, seed = c.get("scheme", "uniform"), c["N"], c["m"], c.get("seed", 0)
    if scheme == "uniform":
        pat = uniform_subset(N, m, seed)
    elif scheme == "bernoulli":
        pat = bernoulli_mask(N, c.get("theta", m / N), seed)
    else:
        w = np.asarray(c["weights"]) if "weights" in c else c.get("C1", 1.0) / np.sqrt(np.arange(1, N + 1))
        pat = variable_density(w, m, seed, N)
    os.makedirs(inv.output_dir, exist_ok=True)
    with open(os.path.join(inv.output_dir, "pattern.json"), "w") as fh:
        fh.write(pat.to_json())
    distinct = len(set(int(i) for i in pat.indices))
    return EXIT_OK, _summary([("scheme", pat.scheme), ("N", N), ("m", pat.m), ("distinct", distinct),
                              ("seed", seed)])


def _run_replacement(inv: CliInvocation):
    from .sampling import replacement_sweep

    c = inv.config
    value, arg, n = replacement_sweep(c.get("m_max", 4), c.get("N_max", 4), c.get("s_max", 3))
    os.makedirs(inv.output_dir, exist_ok=True)
    with open(os.path.join(inv.output_dir, "replacement.json"), "w") as fh:
        json.dump({"min_ratio": str(value), "min_ratio_float": float(value), "argmin": arg, "cases": n},
                  fh, indent=1, sort_keys=True)
    return EXIT_OK, _summary([("min_ratio", float(value)), ("exact", str(value)), ("cases", n),
                              ("holds", value >= 0.5)])


def _study_summary(rep):
    study = rep.config["study"]
    pairs = [("study", study)]
    d = rep.diagnostics
    if study == "coherence":
        pairs += [("mu", d["mu"]), ("slope", d["slope"]), ("C1", d["C1"]), ("decay", d["decay_claimed"])]
    elif study == "certificate":
        pairs += [("trials", len(rep.trials)), ("found_rate", d["found_rate"]),
                  ("success_rate", _rate(rep.trials))]
    else:
        pairs += [("trials", len(rep.trials)), ("success_rate", _rate(rep.trials))]
        for a in rep.aggregates:
            key = a["scheme"] if a["system"] in ("", "dft") else f'{a["system"]}.{a["scheme"]}'
            if len(rep.aggregates) > 2:
                key += f'.s{a["s"]}.m{a["m"]}'
            pairs.append((f"rate.{key}", a["success_rate"]))
        if study == "eit_demo":
            pairs.append(("estimates_hold", d["estimates_hold"]))
    return _summary(pairs)


def _rate(trials):
    return sum(1 for t in trials if t.get("success")) / len(trials) if trials else float("nan")


def dispatch(inv: CliInvocation) -> int:
    """Run an invocation, write its files, print the summary and return the exit code."""
    if inv.subcommand == "sample":
        code, line = _run_sample(inv)
    elif inv.subcommand == "replacement-check":
        code, line = _run_replacement(inv)
    else:
        cfg = ExperimentConfig.from_dict(inv.config)
        rep = run_study(cfg)
        emit_report(rep, inv.output_dir, inv.formats)
        code = EXIT_OK
        if cfg.study == "recover" and not rep.all_converged:
            code = EXIT_NOT_CONVERGED
        line = _study_summary(rep)
        if code == EXIT_NOT_CONVERGED:
            line += " converged=false"
    print(line)
    return code


def _error_record(exc, code):
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ConfigError):
        rec["pointer"] = exc.pointer
    print(json.dumps(rec), file=sys.stderr)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_args(argv)
    except UsageError as exc:
        print(_build_parser().format_usage().rstrip(), file=sys.stderr)
        _error_record(exc, EXIT_USAGE)
        return EXIT_USAGE
    except ConfigError as exc:
        _error_record(exc, EXIT_USAGE)
        return EXIT_USAGE
    try:
        return dispatch(inv)
    except (NotConverged, TooManyResamples) as exc:
        _error_record(exc, EXIT_NOT_CONVERGED)
        return EXIT_NOT_CONVERGED
    except ConfigError as exc:
        _error_record(exc, EXIT_USAGE)
        return EXIT_USAGE
    except (AnisoCSError, OSError, ValueError) as exc:
        _error_record(exc, EXIT_RUNTIME)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
