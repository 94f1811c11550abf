"""Command-line entry point.

Exit codes: 0 success, 2 usage or domain error, 3 search budget exhausted,
4 internal invariant violation.

Outputs are committed only after the command has fully succeeded: every file
is written to a temporary sibling first and renamed into place at the end.
With ``--out`` a manifest is written next to the outputs; ``apfree replay``
re-executes it and compares digests.
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
import time
from pathlib import Path

import numpy as np

from . import __version__, fq
from .constants import HSpec, compute_constants, thm_exponents
from .constructions import (annulus_construct, digits6_report, pipeline_lowenergy, pipeline_thm11,
                            random_report, remove_4aps)
from .energy import cauchy_schwarz_report, energy_exponent_report, energy_profile
from .errors import BudgetExhausted, DomainError, ParseError
from .extremal import fk_exact, fk_heuristic, fk_oracle
from .progressions import build_hypergraph, count_3aps, count_4aps, delta_function
from .rng import GENERATOR_ID
from .sets import GroundSet, Interval, dumps, resolve
from .supersaturation import monotonicity, verify_fqn_supersaturation, verify_varnavides

CONSTANT_COLUMNS = ("q", "y_star", "g_star", "c_q", "C_q", "thm11_exponent")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _commit(files: dict) -> None:
    """Write all files via temp-then-rename; nothing lands unless every write succeeds."""
    staged = []
    try:
        for path, data in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
            tmp.write_bytes(data)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if tmp.exists():
                tmp.unlink()


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _load_input(spec: str) -> GroundSet:
    try:
        return resolve(spec)
    except FileNotFoundError as exc:
        raise ParseError(f"cannot read {spec!r}") from exc


# ---- commands ----------------------------------------------------------------


def cmd_constants(args) -> tuple[dict, dict]:
    rows = []
    for q in _ints(args.q):
        c = compute_constants(q)
        rows.append({"q": q, "y_star": c.y_star, "g_star": c.g_star, "c_q": c.c_q, "C_q": c.C_q,
                     "thm11_exponent": thm_exponents(q).thm11})
    fmt = args.format
    if fmt == "json":
        text = to_json({"rows": rows})
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CONSTANT_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        head = f"{'q':>4} {'y*':>14} {'g*':>14} {'c_q':>14} {'C_q':>14} {'thm11':>10}"
        body = [f"{r['q']:>4} {r['y_star']:>14.10f} {r['g_star']:>14.10f} {r['c_q']:>14.10f} "
                f"{r['C_q']:>14.8f} {r['thm11_exponent']:>10.6f}" for r in rows]
        text = "\n".join([head, *body]) + "\n"
    return {"report": text.encode()}, {}


_REQUIRED = {"thm11": ("q", "n"), "lowenergy": ("q", "n"), "annulus": ("input",), "digits6": ("N",),
             "remove4": ("input",)}


def _construct_report(args):
    kind = args.kind
    missing = [name for name in _REQUIRED.get(kind, ()) if getattr(args, name) is None]
    if kind == "random" and args.N is None and (args.q is None or args.n is None):
        missing = ["N or q,n"]
    if missing:
        raise DomainError(f"construct {kind} needs --{', --'.join(missing)}")
    if kind == "thm11":
        return pipeline_thm11(fq.make_space(args.q, args.n), args.seed, strategy=args.strategy)
    if kind == "lowenergy":
        return pipeline_lowenergy(fq.make_space(args.q, args.n), args.eps, args.seed)
    if kind == "annulus":
        return annulus_construct(_load_input(args.input), args.seed, d=args.d, delta=args.delta,
                                 cprime=args.cprime, strategy=args.strategy)
    if kind == "digits6":
        return digits6_report(args.N)
    if kind == "random":
        universe = Interval(args.N) if args.N else fq.make_space(args.q, args.n)
        return random_report(universe, args.p, args.seed)
    if kind == "remove4":
        return remove_4aps(_load_input(args.input), args.strategy)
    raise DomainError(f"unknown construction {kind!r}")


def cmd_construct(args):
    rep = _construct_report(args)
    report = to_json(rep.as_dict()).encode()
    if args.out:
        return {"groundset": dumps(rep.output).encode(), "report": report}, rep.timings
    return {"report": report}, rep.timings


def cmd_analyze(args):
    A = _load_input(args.input)
    out: dict = {"what": args.what, "size": len(A)}
    if args.what == "counts":
        for k, fn in ((3, count_3aps), (4, count_4aps)):
            try:
                c = fn(A)
                out[f"k{k}"] = {"ordered_nontrivial": c.ordered_nontrivial,
                                "unordered_nontrivial": c.unordered_nontrivial}
            except DomainError as exc:
                out[f"k{k}"] = {"undefined": str(exc)}
    elif args.what == "hypergraph":
        H = build_hypergraph(A)
        out.update(vertex_count=H.vertex_count, edge_count=H.edge_count, d_avg=float(H.d_avg),
                   d_avg_exact=str(H.d_avg), delta2=H.delta2, delta3=H.delta3)
        if H.edge_count:
            out["Delta"] = [{"tau": t, "value": delta_function(H, t)} for t in _floats(args.tau)]
    elif args.what == "energy":
        prof = energy_profile(A)
        cs = cauchy_schwarz_report(A, prof)
        out.update(energy=prof.energy, t_ordered=prof.t_ordered,
                   t_nontrivial_unordered=prof.t_nontrivial_unordered,
                   cauchy_schwarz={"lhs": cs.lhs, "rhs": cs.rhs, "slack_ratio": cs.slack_ratio,
                                   "holds": cs.holds},
                   eps_hat=energy_exponent_report(A, prof) if len(A) >= 2 else None)
    elif args.what == "supersat":
        if A.is_field:
            reps = verify_fqn_supersaturation(A.space.q, A.space.n, _floats(args.s), args.trials,
                                              args.seed, threads=args.threads)
            key = "s"
        else:
            reps = verify_varnavides(A.ambient.N, _floats(args.eta), HSpec.parse(args.h), args.trials,
                                     args.seed, threads=args.threads)
            key = "eta"
        out.update(reports=[r.as_dict() for r in reps], all_pass=all(r.passed for r in reps),
                   spearman=monotonicity(reps, key))
    return {"report": to_json(out).encode()}, {}


def cmd_extremal(args):
    A = _load_input(args.input)
    if args.mode == "oracle":
        res = fk_oracle(A, args.k)
    elif args.mode == "exact":
        res = fk_exact(A, args.k, budget=args.budget, tie=args.tie)
    else:
        res = fk_heuristic(A, args.k, iters=args.iters, seed=args.seed, threads=args.threads)
    files = {"report": to_json(res.as_dict()).encode()}
    if args.witness:
        files["witness"] = dumps(res.witness).encode()
    return files, {}


# ---- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="apfree", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--out", help="output path (report JSON, or ground set for construct)")
        p.add_argument("--threads", type=int, default=1)
        if seeded:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("constants", help="c_q, C_q and derived exponents")
    p.add_argument("--q", required=True, help="comma-separated prime powers")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common(p, seeded=False)

    p = sub.add_parser("construct", help="build a set and certify it")
    p.add_argument("kind", choices=("thm11", "lowenergy", "annulus", "digits6", "random", "remove4"))
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--in", dest="input")
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--cprime", type=float, default=1.0)
    p.add_argument("--strategy", choices=("canonical", "greedy"), default="canonical")
    common(p)

    p = sub.add_parser("analyze", help="counts, hypergraph, energy or supersaturation report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--what", choices=("counts", "hypergraph", "energy", "supersat"), required=True)
    p.add_argument("--tau", default="0.1")
    p.add_argument("--s", default="0,0.01,0.02")
    p.add_argument("--eta", default="0.2,0.5,1")
    p.add_argument("--h", default="logpower:0.1:0.5")
    p.add_argument("--trials", type=int, default=20)
    common(p)

    p = sub.add_parser("extremal", help="largest k-AP-free subset")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, choices=(3, 4), default=3)
    p.add_argument("--mode", choices=("exact", "oracle", "heuristic"), default="exact")
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--tie", choices=("smallest", "largest"), default="smallest")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--witness", help="also write the witness ground set here")
    common(p)

    p = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    p.add_argument("manifest")
    p.add_argument("--out-dir", required=True)
    return ap


COMMANDS = {"constants": cmd_constants, "construct": cmd_construct, "analyze": cmd_analyze,
            "extremal": cmd_extremal}


def _paths(args) -> dict:
    """Where each output role goes when --out is given."""
    base = Path(args.out)
    if args.command == "construct":
        paths = {"groundset": base, "report": base.with_name(base.name + ".report.json")}
    else:
        paths = {"report": base}
    if getattr(args, "witness", None):
        paths["witness"] = Path(args.witness)
    return paths


def _normalize_argv(argv: list[str]) -> list[str]:
    """Absolute paths for --in files so a manifest replays from any directory."""
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok == "--in" and Path(out[i + 1]).exists():
            out[i + 1] = str(Path(out[i + 1]).resolve())
    return out


def _execute(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    files, stage_timings = COMMANDS[args.command](args)
    elapsed = time.perf_counter() - t0
    if not args.out:
        sys.stdout.write(files["report"].decode())
        if "witness" in files and args.witness:
            _commit({args.witness: files["witness"]})
        return 0
    paths = _paths(args)
    payload = {paths[role]: data for role, data in files.items()}
    inputs = {}
    if getattr(args, "input", None) and Path(args.input).exists():
        inputs[str(Path(args.input).resolve())] = sha256(Path(args.input).read_bytes())
    manifest = {
        "command": args.command,
        "argv": _normalize_argv(argv),
        "params": {k: v for k, v in vars(args).items() if k not in ("out", "witness")},
        "seeds": [args.seed] if hasattr(args, "seed") else [],
        "generator_id": GENERATOR_ID,
        "tool_version": __version__,
        "timings": {"total": elapsed, **stage_timings},
        "inputs": inputs,
        "outputs": {role: {"path": str(paths[role]), "sha256": sha256(data)} for role, data in files.items()},
    }
    payload[Path(str(args.out) + ".manifest.json")] = to_json(manifest).encode()
    _commit(payload)
    return 0


def _replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    argv = list(manifest["argv"])
    out_dir = Path(args.out_dir)
    for flag in ("--out", "--witness"):
        if flag in argv:
            i = argv.index(flag)
            argv[i + 1] = str(out_dir / Path(argv[i + 1]).name)
    new_args = build_parser().parse_args(argv)
    _execute(new_args, argv)
    fresh = {role: sha256(Path(p).read_bytes()) for role, p in _paths(new_args).items()}
    expected = {role: o["sha256"] for role, o in manifest["outputs"].items()}
    identical = fresh == expected
    sys.stdout.write(to_json({"identical": identical, "expected": expected, "replayed": fresh}))
    return 0 if identical else 4


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return _replay(args)
        if getattr(args, "threads", 1) < 1:
            raise DomainError("--threads must be at least 1")
        return _execute(args, argv)
    except BudgetExhausted as exc:
        inc = exc.incumbent.as_dict() if exc.incumbent is not None else None
        sys.stdout.write(to_json({"error": "BudgetExhausted", "message": str(exc), "incumbent": inc}))
        return 3
    except (ValueError, OverflowError) as exc:
        sys.stderr.write(to_json({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(to_json({"error": type(exc).__name__, "message": str(exc)}))
        return 4


def run() -> None:
    sys.exit(main())
