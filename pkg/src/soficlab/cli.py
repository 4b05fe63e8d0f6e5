"""Batch command-line front end.

Every subcommand takes one JSON config (a path, or ``fixture:NAME`` for a
bundled fixture). Exit codes: 0 ok, 1 verification failure, 2 config error,
3 budget exceeded. Errors are reported as JSON on stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import counting as ct
from . import partitions as pt
from . import sofic as sf
from .bernoulli import ow_pushforward_check
from .groups import GroupError, GroupSpec, ball, product_set
from .verify import SUITES, run_suites

OUTPUT_ENV = "SOFICLAB_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config handling


def load_config(ref: str) -> tuple[dict, Path]:
    """Parsed config and the directory relative paths resolve against."""
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        res = resources.files("soficlab") / "fixtures" / f"{name}.json"
        if not res.is_file():
            raise ConfigError(f"no bundled fixture named {name!r}")
        return json.loads(res.read_text()), Path(str(res)).parent
    path = Path(ref)
    if not path.is_file():
        raise ConfigError(f"config file {ref!r} does not exist")
    try:
        return json.loads(path.read_text()), path.parent
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canon.encode()).hexdigest()


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing {key!r}")
    return cfg[key]


def group_of(cfg: dict) -> GroupSpec:
    return GroupSpec.from_json(_need(cfg, "group"))


def _resolve(base: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else base / p


def sigmas_of(cfg: dict, spec: GroupSpec, base: Path) -> list[sf.SymMap]:
    appr = _need(cfg, "approximation")
    if "files" in appr:
        out = [sf.SymMap.load(_resolve(base, f)) for f in appr["files"]]
        for s in out:
            if s.owner != spec:
                raise ConfigError("approximation file is for a different group")
        return out
    builder = appr.get("builder", "quotient")
    schedule = [int(x) for x in appr.get("schedule", [])]
    if not schedule:
        raise ConfigError("approximation schedule is empty")
    if builder == "quotient":
        return sf.build_quotient_approx(spec, schedule)
    if builder == "folner":
        return sf.build_folner_approx(spec, schedule)
    if builder == "random-free":
        seed = int(appr.get("seed", cfg.get("seed", 0)))
        return [sf.build_random_free_approx(spec, m, seed + i) for i, m in enumerate(schedule)]
    raise ConfigError(f"unknown approximation builder {builder!r}")


def space_of(cfg: dict, spec: GroupSpec) -> pt.ModelSpace:
    model = _need(cfg, "model")
    backend = model.get("backend", "bernoulli")
    if backend == "bernoulli":
        return pt.BernoulliSpace(spec, tuple(_need(model, "weights")), tuple(model.get("alphabet", ())))
    if backend == "finite-gset":
        action = model.get("action", "regular")
        return pt.FiniteGSet.regular(spec) if action == "regular" else pt.FiniteGSet.natural(spec)
    raise ConfigError(f"unknown model backend {backend!r}")


def partition_of(obj, space: pt.ModelSpace, base: Path) -> pt.ModelPartition:
    if obj == "canonical":
        return pt.canonical_bernoulli_partition(space)
    if obj == "trivial":
        return pt.trivial_partition(space)
    if isinstance(obj, str) and obj.startswith("file:"):
        with open(_resolve(base, obj[5:])) as fh:
            data = json.load(fh)
        return pt.ModelPartition.from_json(data, space if "space" not in data else None)
    if isinstance(obj, dict):
        return pt.ModelPartition.from_json(obj, space if "space" not in obj else None)
    raise ConfigError(f"cannot read partition {obj!r}")


def elements_of(obj, spec: GroupSpec) -> list:
    """A finite subset of G: a list of encoded elements or {"ball": r}."""
    if isinstance(obj, dict) and "ball" in obj:
        return sorted(ball(spec, int(obj["ball"])), key=lambda g: g.sort_key())
    if isinstance(obj, list) and obj:
        return [spec.element(e) for e in obj]
    raise ConfigError(f"cannot read a finite set from {obj!r}")


def fin_partition_of(obj, base: Path) -> ct.FinPartition:
    if isinstance(obj, str):
        return ct.FinPartition.load(_resolve(base, obj[5:] if obj.startswith("file:") else obj))
    return ct.FinPartition.from_json(obj)


# ---------------------------------------------------------------------------
# output


def clean(x):
    """Round floats to 12 significant digits and make the result JSON-safe."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    return x


def meta(cfg: dict) -> dict:
    return {"tool": "soficlab", "version": __version__, "config_sha256": config_hash(cfg)}


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def out_dir(args, cfg: dict, base: Path) -> Path | None:
    chosen = os.environ.get(OUTPUT_ENV) or args.out or cfg.get("output", {}).get("dir")
    if not chosen:
        return None
    p = Path(chosen)
    p.mkdir(parents=True, exist_ok=True)
    return p


def write(dirpath: Path | None, name: str, text: str) -> None:
    if dirpath is not None:
        (dirpath / name).write_text(text)


def csv_text(rows: list[list[str]], cfg: dict) -> str:
    buf = io.StringIO()
    m = meta(cfg)
    buf.write(f"# {m['tool']} {m['version']} config_sha256={m['config_sha256']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ct.CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_approx(args, cfg, base) -> int:
    spec = group_of(cfg)
    sigmas = sigmas_of(cfg, spec, base)
    radius = int(cfg.get("certify_radius", 1))
    F = ball(spec, radius)
    support = product_set(F, F) | F
    dest = out_dir(args, cfg, base)
    reports = []
    for i, s in enumerate(sigmas):
        s.extend(sorted(support, key=lambda g: g.sort_key()))
        rep = sf.good_set(s, F)
        reports.append({"i": i, "m": s.m, "radius": radius, "epsilon": rep.epsilon,
                        "good_set_size": len(rep.good_set)})
        body = s.to_json()
        body["meta"] = meta(cfg)
        write(dest, f"sigma_{i}.json", json.dumps(body, separators=(",", ":")) + "\n")
        write(dest, f"sigma_{i}_report.json", dumps({"meta": meta(cfg), **rep.to_json()}))
    sys.stdout.write(dumps({"meta": meta(cfg), "approximations": reports}))
    return 0


def cmd_dist(args, cfg, base) -> int:
    spec = group_of(cfg)
    space = space_of(cfg, spec)
    alpha = partition_of(_need(cfg, "partition"), space, base)
    out = {"meta": meta(cfg)}
    if "partition_b" in cfg:
        beta = partition_of(cfg["partition_b"], space, base)
        out["rohlin_distance"] = pt.rohlin_distance(alpha, beta)
        if "F" in cfg:
            out["dF_model"] = pt.dF_model(alpha, beta, elements_of(cfg["F"], spec))
    if "finite_partition" in cfg:
        sigma = sigmas_of(cfg, spec, base)[int(cfg.get("index", 0))]
        bbar = fin_partition_of(cfg["finite_partition"], base)
        out["dF"] = ct.dF(sigma, alpha, bbar, elements_of(_need(cfg, "F"), spec))
    if len(out) == 1:
        raise ConfigError("dist needs 'partition_b' or 'finite_partition'")
    text = dumps(out)
    write(out_dir(args, cfg, base), "dist.json", text)
    sys.stdout.write(text)
    return 0


def _count_settings(cfg):
    return dict(
        mode=cfg.get("mode", "auto"),
        budget=int(cfg.get("budget", ct.DEFAULT_ENUM_BUDGET)),
        n_samples=int(cfg.get("n_samples", 20000)),
        seed=int(cfg.get("seed", 0)),
    )


def cmd_count_ap(args, cfg, base) -> int:
    spec = group_of(cfg)
    space = space_of(cfg, spec)
    alpha = partition_of(_need(cfg, "partition"), space, base)
    sigma = sigmas_of(cfg, spec, base)[int(cfg.get("index", 0))]
    F = elements_of(_need(cfg, "F"), spec)
    eps = float(_need(cfg, "epsilon"))
    st = _count_settings(cfg)
    res = ct.count_ap(sigma, alpha, F, eps, st["mode"], st["budget"], st["n_samples"], st["seed"],
                      args.workers)
    body = {"meta": meta(cfg), **res.to_json()}
    text = dumps(body)
    write(out_dir(args, cfg, base), "count_ap.json", text)
    sys.stdout.write(text)
    return 0


def cmd_rate_curve(args, cfg, base) -> int:
    spec = group_of(cfg)
    space = space_of(cfg, spec)
    alpha = partition_of(_need(cfg, "partition"), space, base)
    sigmas = sigmas_of(cfg, spec, base)
    F = elements_of(_need(cfg, "F"), spec)
    st = _count_settings(cfg)
    curve = ct.rate_curve(sigmas, alpha, F, float(_need(cfg, "epsilon")), st["mode"], st["budget"],
                          st["n_samples"], st["seed"], args.workers)
    text = csv_text(ct.curve_rows(curve), cfg)
    dest = out_dir(args, cfg, base)
    write(dest, "rate_curve.csv", text)
    write(dest, "rate_curve.json", dumps({"meta": meta(cfg), "entries": [e.__dict__ for e in curve.entries]}))
    sys.stdout.write(text)
    return 0


def cmd_h_report(args, cfg, base) -> int:
    spec = group_of(cfg)
    space = space_of(cfg, spec)
    alpha = partition_of(_need(cfg, "partition"), space, base)
    sigmas = sigmas_of(cfg, spec, base)
    Fs = [elements_of(F, spec) for F in _need(cfg, "F_schedule")]
    eps = [float(e) for e in _need(cfg, "eps_schedule")]
    st = _count_settings(cfg)
    try:
        rep = ct.h_report(sigmas, alpha, Fs, eps, st["mode"], int(cfg.get("tail", 3)), st["budget"],
                          st["n_samples"], st["seed"], args.workers)
    except ct.CountingError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [r for row in rep.curves for c in row for r in ct.curve_rows(c)]
    body = {
        "meta": meta(cfg),
        "headline": rep.headline,
        "note": rep.note,
        "tail": rep.tail,
        "F_radii": rep.F_radii,
        "epsilons": rep.epsilons,
        "tail_max": rep.tail_max,
        "tail_min": rep.tail_min,
    }
    text = dumps(body)
    dest = out_dir(args, cfg, base)
    write(dest, "h_report.json", text)
    write(dest, "h_report.csv", csv_text(rows, cfg))
    sys.stdout.write(text)
    return 0


def cmd_verify(args, cfg, base) -> int:
    names = args.suite or cfg.get("suites") or list(SUITES)
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 20240601))
    try:
        results = run_suites(names, seed)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    lines = []
    for r in results:
        for c in r.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {r.suite:<14} {c.name}")
    ok = all(r.passed for r in results)
    m = meta(cfg)
    header = f"# {m['tool']} {m['version']} config_sha256={m['config_sha256']} seed={seed}\n"
    table = header + "\n".join(lines) + f"\n{'ALL PASS' if ok else 'FAILURES'}\n"
    body = {"meta": meta(cfg), "seed": seed, "suites": [r.to_json() for r in results], "passed": ok}
    dest = out_dir(args, cfg, base)
    write(dest, "verify.json", dumps(body))
    write(dest, "verify.txt", table)
    sys.stdout.write(table)
    return 0 if ok else 1


def cmd_ow_demo(args, cfg, base) -> int:
    spec = GroupSpec.from_json(cfg["group"]) if "group" in cfg else GroupSpec.free(2)
    radius = int(args.radius if args.radius is not None else cfg.get("radius", 1))
    weights = args.weights or cfg.get("weights", [0.5, 0.5])
    rep = ow_pushforward_check(spec, radius, tuple(float(w) for w in weights))
    text = dumps({"meta": meta(cfg), **rep.to_json()})
    write(out_dir(args, cfg, base), "ow_demo.json", text)
    sys.stdout.write(text)
    return 0 if rep.passed else 1


COMMANDS = {
    "build-approx": cmd_build_approx,
    "dist": cmd_dist,
    "count-ap": cmd_count_ap,
    "rate-curve": cmd_rate_curve,
    "h-report": cmd_h_report,
    "verify": cmd_verify,
    "ow-demo": cmd_ow_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="soficlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"soficlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        optional = name in ("verify", "ow-demo")
        p.add_argument("config", nargs="?" if optional else None,
                       help="JSON config path or fixture:NAME")
        p.add_argument("--out", help="directory for output artifacts")
        p.add_argument("--workers", type=int, default=1, help="parallel workers (results do not depend on it)")
        if name == "verify":
            p.add_argument("--suite", action="append", help="suite name, repeatable")
            p.add_argument("--seed", type=int)
        if name == "ow-demo":
            p.add_argument("--radius", type=int)
            p.add_argument("--weights", type=float, nargs=2)
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        return _fail("config", "--workers must be >= 1", 2)
    try:
        if args.config:
            cfg, base = load_config(args.config)
        else:
            cfg, base = {}, Path.cwd()
        return COMMANDS[args.command](args, cfg, base)
    except pt.BudgetError as exc:
        return _fail("budget", str(exc), 3)
    except (ConfigError, GroupError, sf.SoficError, pt.PartitionError, ct.CountingError,
            KeyError, TypeError, ValueError, FileNotFoundError) as exc:
        return _fail("config", str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())
