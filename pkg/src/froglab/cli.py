"""Command line: one subcommand per experiment.

Options may also come from a flat ``key = value`` file passed with
``--config``; command-line flags win. Unknown keys are an error. Exit codes:
0 success, 2 configuration error, 3 infeasible budget, 4 everything censored.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import AllCensoredError, ConfigError, FroglabError, InfeasibleError

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_CENSORED = 0, 2, 3, 4


# ------------------------------------------------------------------ value types

def parse_site(text: str) -> tuple:
    try:
        return tuple(int(c) for c in str(text).replace(" ", "").split(","))
    except ValueError:
        raise ConfigError(f"bad site {text!r}; expected comma-separated integers") from None


def parse_sites(text: str) -> list:
    return [parse_site(part) for part in str(text).split(";") if part.strip()]


def parse_int_list(text: str) -> list:
    """``3..12``, ``3..12..3`` or ``10,20,40``."""
    text = str(text).replace(" ", "")
    try:
        if ".." in text:
            parts = [int(p) for p in text.split("..")]
            step = parts[2] if len(parts) == 3 else 1
            if len(parts) not in (2, 3) or step < 1:
                raise ValueError
            return list(range(parts[0], parts[1] + 1, step))
        return [int(p) for p in text.split(",") if p]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


def parse_float_list(text: str) -> list:
    try:
        return [float(p) for p in str(text).replace(" ", "").split(",") if p]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad number {text!r}") from None


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"bad integer {text!r}") from None


# name, converter, default, help
COMMON = [
    ("seed", _int, 0, "master seed"),
    ("d", _int, 2, "dimension"),
    ("threads", _int, None, "worker processes (default: FROGLAB_THREADS or 1)"),
    ("level", _float, 0.95, "confidence level"),
]

OPTIONS = {
    "passage": [("r", _float, 1.0, "occupation parameter"),
                ("target", parse_site, None, "target site, e.g. 10,0"),
                ("source", parse_site, None, "source site (default origin)"),
                ("H", _int, None, "walk horizon (default c0_factor * ||target||)"),
                ("W", _int, None, "window radius (default H)"),
                ("c0_factor", _float, 8.0, "horizon factor"),
                ("replicate", _int, 0, "replicate substream")],
    "mu": [("r", _float, 1.0, "occupation parameter"),
           ("x", parse_site, "1,0", "direction"),
           ("n", parse_int_list, "10,20,40", "multipliers"),
           ("replicates", _int, 200, "replicates"),
           ("c0_factor", _float, 8.0, "horizon factor")],
    "lipschitz": [("r_list", parse_float_list, "0.4,0.5,0.6,0.7,0.8,0.9,1.0", "parameters (adjacent pairs)"),
                  ("x", parse_site, "1,0", "direction"),
                  ("n", _int, 40, "multiplier"),
                  ("replicates", _int, 2000, "replicates"),
                  ("r0", _float, 0.3, "lower parameter bound"),
                  ("c0_factor", _float, 8.0, "horizon factor")],
    "influence": [("r", _float, 0.7, "occupation parameter"),
                  ("y", parse_site, "10,0", "target"),
                  ("N", _int, 30, "truncation level"),
                  ("replicates", _int, 1000, "replicates"),
                  ("n_factor", _float, 3.0, "minimum N / ||y||")],
    "russo": [("r", _float, 0.7, "occupation parameter"),
              ("h", _float, 0.05, "finite-difference step"),
              ("y", parse_site, "10,0", "target"),
              ("N", _int, 30, "truncation level"),
              ("replicates", _int, 100000, "replicates per side"),
              ("n_factor", _float, 3.0, "minimum N / ||y||")],
    "delay-census": [("r", _float, 1.0, "occupation parameter"),
                     ("L", _int, 5, "sphere radius"),
                     ("y", parse_site, "100,0", "target"),
                     ("replicates", _int, 10000, "replicates"),
                     ("c0_factor", _float, 8.0, "horizon and passage bound factor")],
    "sphere-decay": [("L", parse_int_list, "1..12", "radii"),
                     ("replicates", _int, 200000, "replicates"),
                     ("fit_level", _float, 0.99, "confidence for the slope")],
    "tail": [("r", _float, 0.7, "occupation parameter"),
             ("y", parse_sites, "20,0", "targets separated by ';'"),
             ("t", parse_int_list, "20..100..5", "time grid"),
             ("replicates", _int, 2000, "replicates"),
             ("c_factor", _float, 1.0, "grid must reach c_factor * ||y||")],
    "shape": [("p", _float, 0.5, "lower parameter"),
              ("q", _float, 1.0, "upper parameter"),
              ("t", _int, 100, "time"),
              ("replicates", _int, 500, "coupled replicates"),
              ("directions", _int, 8, "number of directions")],
    "exact": [("what", str, None, "q3 | q2 | delta2 | prob | recursion"),
              ("event", str, "tau-shell", "prob: tau-shell | S | T | U | passage | q"),
              ("m", _int, 3, "tau-shell radius"),
              ("i", _int, 1, "axis index for S/T/U (1-based)"),
              ("y", parse_site, None, "site for passage / q events"),
              ("A", _int, 3, "block length"),
              ("n", _int, 2, "recursion power"),
              ("replicates", _int, 100000, "recursion Monte Carlo budget"),
              ("target_halfwidth", _float, None, "recursion: required CI half-width"),
              ("budget", _int, 10**8, "enumeration cap")],
}

SUBCOMMANDS = list(OPTIONS)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="froglab", description="Frog model first-passage experiments")
    parser.add_argument("--version", action="version", version=f"froglab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        p = sub.add_parser(cmd)
        if cmd == "exact":
            p.add_argument("what", choices=["q3", "q2", "delta2", "prob", "recursion"])
        for name, _, default, help_ in COMMON + opts:
            if name == "what":
                continue
            p.add_argument(_flag(name), dest=name, default=argparse.SUPPRESS,
                           help=f"{help_} (default {default})")
        p.add_argument("--config", default=None, help="key = value file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--dry-run", action="store_true", help="validate and print the budget only")
    rp = sub.add_parser("replay", help="rerun a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--threads", type=int, default=None)
    rp.add_argument("--out", default=None)
    return parser


def read_config(path: str | Path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(cmd: str, cli_values: dict, config_values: dict | None = None) -> dict:
    """Defaults, then config file, then command-line flags; convert and validate keys."""
    specs = {name: (conv, default) for name, conv, default, _ in COMMON + OPTIONS[cmd]}
    raw = {}
    for key, value in (config_values or {}).items():
        if key not in specs:
            raise ConfigError(f"unknown key {key!r} for {cmd}")
        raw[key] = value
    raw.update(cli_values)
    params = {}
    for name, (conv, default) in specs.items():
        value = raw.get(name, default)
        if value is not None and isinstance(value, str):
            value = conv(value)
        params[name] = value
    return params


# ------------------------------------------------------------------ runners
# Each returns (result dict, csv (header, rows) or None, svg text or None, field spec dict).

def _jsonable_site(x):
    return list(x) if x is not None else None


def run_passage(P):
    from .field import FieldSpec, RandomField
    from .lattice import l1_norm, origin
    from .passage import Config, first_passage

    if P["target"] is None:
        raise ConfigError("passage needs --target")
    d = len(P["target"])
    source = P["source"] or origin(d)
    H = P["H"] or max(8, int(math.ceil(P["c0_factor"] * (l1_norm(P["target"]) + l1_norm(source)))))
    W = P["W"] or H + l1_norm(source)
    spec = FieldSpec(P["seed"], d, W, H, P["replicate"])
    f = RandomField(spec)
    try:
        res = first_passage(f, Config.at(f, P["r"]), source, P["target"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return res.to_json(), None, None, spec.to_dict()


def run_mu(P):
    from .estimators import estimate_mu

    out = estimate_mu(P["r"], P["x"], P["n"], P["replicates"], P["seed"], P["c0_factor"],
                      threads=P["threads"], level=P["level"])
    recs = out["records"]
    rows = [(r.params["n"], r.estimate, r.stderr, r.ci[0], r.ci[1], r.n, r.censored) for r in recs]
    result = {"schema": 1, "records": [r.to_dict() for r in recs], "decreasing": out["decreasing"],
              "decreasing_within_ci": out["decreasing_within_ci"]}
    return result, (["n", "estimate", "stderr", "ci_low", "ci_high", "n_used", "censored"], rows), \
        None, recs[-1].field_spec


def run_lipschitz(P):
    from .estimators import band_ratio, lipschitz_ladder

    rs = P["r_list"]
    if len(rs) < 2:
        raise ConfigError("need at least two parameters")
    if min(rs) < P["r0"]:
        raise ConfigError(f"parameters below r0={P['r0']}")
    reps = lipschitz_ladder(rs, P["x"], P["n"], P["replicates"], P["seed"], P["c0_factor"],
                            P["threads"], P["level"])
    rows = [(rp.p, rp.q, rp.record.estimate, rp.record.stderr, rp.ratio.estimate, rp.ratio.ci[0],
             rp.ratio.ci[1], rp.record.n, rp.record.censored, rp.negative_samples) for rp in reps]
    result = {"schema": 1, "pairs": [rp.to_dict() for rp in reps], "band_ratio": band_ratio(reps)}
    header = ["p", "q", "difference", "stderr", "ratio", "ratio_ci_low", "ratio_ci_high", "n",
              "censored", "negative_samples"]
    return result, (header, rows), None, reps[0].record.field_spec


def run_influence(P):
    from .estimators import influence_profile

    prof = influence_profile(P["r"], P["y"], P["N"], P["replicates"], P["seed"], P["n_factor"],
                             P["threads"], P["level"])
    rows = [(list(z), rec.estimate, rec.stderr) for z, rec in sorted(prof.per_site.items())
            if rec.estimate != 0 or rec.stderr != 0]
    result = {"schema": 1, "total": prof.total.to_dict(), "u": prof.u_record.to_dict(),
              "negative_samples": prof.negative_samples, "nonzero_sites": len(rows)}
    return result, (["z", "estimate", "stderr"], rows), None, prof.total.field_spec


def run_russo(P):
    from .estimators import russo_check

    rep = russo_check(P["r"], P["h"], P["y"], P["N"], P["replicates"], P["seed"], P["n_factor"],
                      P["threads"], P["level"])
    rows = [("finite_difference", rep.derivative.estimate, rep.derivative.stderr,
             rep.derivative.ci[0], rep.derivative.ci[1]),
            ("influence_sum", rep.influence.estimate, rep.influence.stderr, rep.influence.ci[0],
             rep.influence.ci[1])]
    result = dict(rep.to_dict(), schema=1)
    return result, (["estimator", "estimate", "stderr", "ci_low", "ci_high"], rows), None, \
        rep.derivative.field_spec


def run_delay(P):
    from .estimators import delay_census

    c = delay_census(P["r"], P["L"], P["y"], P["replicates"], P["seed"], P["c0_factor"],
                     P["threads"], P["level"])
    rows = [(list(z), c.counts[z], freq) for z, freq in c.per_site.items()]
    result = dict(c.to_dict(), schema=1)
    return result, (["z", "count", "frequency"], rows), None, c.total.field_spec


def run_sphere(P):
    from .artifacts import log_plot_svg
    from .estimators import sphere_decay

    s = sphere_decay(P["L"], P["replicates"], P["d"], P["seed"], P["threads"], P["level"],
                     P["fit_level"])
    Ls = sorted(s.records)
    rows = [(L, s.records[L].estimate, s.records[L].ci[0], s.records[L].ci[1], s.records[L].n)
            for L in Ls]
    svg = log_plot_svg(Ls, [s.records[L].estimate for L in Ls], [s.records[L].ci[0] for L in Ls],
                       [s.records[L].ci[1] for L in Ls])
    result = dict(s.to_dict(), schema=1)
    return result, (["L", "p_hat", "ci_low", "ci_high", "n"], rows), svg, \
        s.records[Ls[0]].field_spec


def run_tail(P):
    from .estimators import tail_fit

    reps = tail_fit(P["r"], P["y"], P["t"], P["replicates"], P["seed"], P["c_factor"], P["threads"])
    rows = []
    for rp in reps:
        for t, s, ds in zip(rp.t_grid, rp.survival, rp.direct):
            rows.append((list(rp.y), t, s, ds))
    result = {"schema": 1, "reports": [rp.to_dict() for rp in reps]}
    return result, (["y", "t", "survival", "direct_survival"], rows), None, \
        {"master_seed": P["seed"], "d": len(P["y"][0])}


def run_shape(P):
    from .artifacts import shape_overlay_svg
    from .shape import compare_shapes

    if not P["p"] < P["q"]:
        raise ConfigError("need p < q")
    c = compare_shapes([P["p"], P["q"]], P["t"], P["replicates"], P["d"], P["seed"],
                       P["directions"], P["threads"], P["level"])
    rows = []
    for est in c.estimates:
        for v, rec in zip(est.directions, est.radii):
            rows.append((est.r, list(v), rec.estimate, rec.stderr))
    svg = None
    if P["d"] == 2 and all(e.cloud is not None for e in c.estimates):
        svg = shape_overlay_svg([e.cloud for e in c.estimates], [f"r={e.r}" for e in c.estimates])
    result = dict(c.to_dict(), schema=1)
    return result, (["r", "direction", "radius", "stderr"], rows), svg, \
        {"master_seed": P["seed"], "d": P["d"], "window": P["t"], "horizon": P["t"]}


def run_exact(P):
    from . import exact

    d = P["d"]
    what = P["what"]
    if what == "q3":
        return exact.q3_report(d).to_json(), None, None, None
    if what == "q2":
        q = exact.q_small(2, d, P["budget"])
        return {"schema": 1, "d": d, "q2": exact.frac_json(q)}, None, None, None
    if what == "delta2":
        s = exact.delta2_passage_sum(d)
        return {"schema": 1, "d": d, "mixed": exact.frac_json(s.mixed),
                "axis": exact.frac_json(s.axis), "total": exact.frac_json(s.total)}, None, None, None
    if what == "prob":
        ev = P["event"]
        if ev == "tau-shell":
            spec = exact.tau_shell_spec(d, P["m"])
        elif ev in ("S", "T", "U"):
            if not 1 <= P["i"] <= d:
                raise ConfigError("axis index out of range")
            spec = exact.two_step_events(d, P["i"] - 1)[ev]
        elif ev in ("passage", "q"):
            if P["y"] is None or len(P["y"]) != d:
                raise ConfigError(f"{ev} event needs --y with {d} coordinates")
            spec = (exact.geodesic_passage_spec(d, P["y"]) if ev == "passage"
                    else exact.q_event_spec(d, P["A"], P["y"]))
        else:
            raise ConfigError(f"unknown event {ev!r}")
        spec.budget = P["budget"]
        p = exact.exact_prob(spec)
        return {"schema": 1, "d": d, "event": spec.label, "probability": exact.frac_json(p),
                "assignments": spec.required_budget()}, None, None, None
    if what == "recursion":
        try:
            rep = exact.recursion_check(P["A"], P["n"], P["replicates"], d, P["seed"], 0.99,
                                        P["target_halfwidth"], P["threads"])
        except InfeasibleError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return rep.to_json(), None, None, {"master_seed": P["seed"], "d": d}
    raise ConfigError(f"unknown exact target {what!r}")


RUNNERS = {"passage": run_passage, "mu": run_mu, "lipschitz": run_lipschitz,
           "influence": run_influence, "russo": run_russo, "delay-census": run_delay,
           "sphere-decay": run_sphere, "tail": run_tail, "shape": run_shape, "exact": run_exact}


def budget_estimate(cmd: str, P: dict) -> dict:
    """Rough work estimate in passage searches; no computation is done."""
    reps = P.get("replicates") or 1
    per = {
        "passage": lambda: 1,
        "mu": lambda: len(P["n"]),
        "lipschitz": lambda: len(P["r_list"]),
        "influence": lambda: 25,
        "russo": lambda: 27,
        "delay-census": lambda: 2 + sum(abs(c) for c in P["y"]),
        "sphere-decay": lambda: 1,
        "tail": lambda: 2 * len(P["y"]),
        "shape": lambda: 2,
    }.get(cmd, lambda: 0)()
    est = {"schema": 1, "command": cmd, "replicates": reps, "searches": reps * per}
    if cmd == "exact":
        est["searches"] = 0
        if P["what"] == "recursion":
            est["searches"] = P["replicates"]
    return est


def _validate(P):
    if P.get("threads") is not None and P["threads"] < 1:
        raise ConfigError("threads must be positive")
    for key in ("r", "p", "q"):
        if P.get(key) is not None and not 0 < P[key] <= 1:
            raise ConfigError(f"{key}={P[key]} outside (0, 1]")
    if P.get("replicates") is not None and P["replicates"] < 1:
        raise ConfigError("replicates must be positive")
    if P.get("d") is not None and P["d"] < 1:
        raise ConfigError("d must be positive")
    lvl = P.get("level")
    if lvl is not None and not 0 < lvl < 1:
        raise ConfigError("level must lie in (0, 1)")


def execute(cmd: str, P: dict, out_dir: str | None, dry_run: bool = False) -> int:
    from .artifacts import csv_text, dumps, manifest, write_text

    _validate(P)
    if dry_run:
        sys.stdout.write(dumps(budget_estimate(cmd, P)))
        return EXIT_OK
    start = time.perf_counter()
    result, table, svg, spec = RUNNERS[cmd](P)
    wall = time.perf_counter() - start
    text = dumps(result)
    if out_dir is None:
        sys.stdout.write(text)
        return EXIT_OK
    out = Path(out_dir)
    digests = {"result.json": write_text(out / "result.json", text)}
    if table is not None:
        digests["result.csv"] = write_text(out / "result.csv", csv_text(*table))
    if svg is not None:
        digests["plot.svg"] = write_text(out / "plot.svg", svg)
    echo = {k: _echo(v) for k, v in P.items()}
    write_text(out / "manifest.json", dumps(manifest(cmd, echo, spec, digests, wall)))
    sys.stdout.write(text)
    return EXIT_OK


def _echo(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, list):
        return [_echo(x) for x in v]
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    return v


def _from_manifest(path: str) -> tuple[str, dict]:
    data = json.loads(Path(path).read_text())
    if data.get("schema") != 1 or data.get("tool") != "froglab":
        raise ConfigError("not a froglab manifest")
    cmd = data["subcommand"]
    if cmd not in OPTIONS:
        raise ConfigError(f"unknown subcommand {cmd!r} in manifest")
    P = {}
    specs = {name for name, *_ in COMMON + OPTIONS[cmd]}
    for key, value in data["params"].items():
        if key not in specs:
            raise ConfigError(f"unknown key {key!r} in manifest")
        if isinstance(value, list):
            value = [tuple(v) if isinstance(v, list) else v for v in value]
            if key in ("x", "y", "target", "source") and cmd != "tail":
                value = tuple(value)
        P[key] = value
    return cmd, P


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            cmd, P = _from_manifest(args.manifest)
            if args.threads is not None:
                P["threads"] = args.threads
            return execute(cmd, P, args.out)
        cli_values = {k: v for k, v in vars(args).items()
                      if k not in ("command", "config", "out", "dry_run")}
        config_values = read_config(args.config) if args.config else None
        P = resolve(args.command, cli_values, config_values)
        return execute(args.command, P, args.out, args.dry_run)
    except ConfigError as exc:
        print(f"froglab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"froglab: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except AllCensoredError as exc:
        print(f"froglab: all replicates censored: {exc}", file=sys.stderr)
        return EXIT_CENSORED
    except FroglabError as exc:
        print(f"froglab: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"froglab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
