"""Command line: ``isoperturb {test,gen,trace,hunt,bench}``.

Exit codes for ``test``: 0 isomorphic, 1 not isomorphic or not reconstructible, 2 usage/parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import random
import sys
import time
from pathlib import Path

from .config import RunConfig
from .engine import run_base_scheme
from .graphs import (
    GraphFormatError,
    complete,
    emit_edge_list,
    generate,
    gnp,
    move_edge,
    permuted_pair,
    read_graph,
    rewire,
    torus,
    write_graph,
)
from .oracle import DEFAULT_CAP, brute_force_iso
from .trace import render_human, to_json_lines

log = logging.getLogger("isoperturb")

EPS_MODES = {"adaptive": "adaptive", "paper": "paper_example"}


class UsageError(Exception):
    pass


def _setup_logging() -> None:
    level = os.environ.get("ISO_PERTURB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _config(args) -> RunConfig:
    return RunConfig(
        backend=args.backend,
        eps_mode=EPS_MODES[args.eps],
        mantissa_bits=args.mantissa_bits,
        seed=args.seed,
        output="structured" if args.format == "json-lines" else "human",
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_pair(args):
    try:
        return read_graph(args.file_a), read_graph(args.file_b)
    except OSError as exc:
        raise UsageError(f"cannot read graph: {exc}") from exc
    except (GraphFormatError, ValueError) as exc:
        raise UsageError(f"parse error: {exc}") from exc


# ---------------------------------------------------------------- commands

def cmd_test(args) -> int:
    ga, gb = _load_pair(args)
    config = _config(args)
    outcome = run_base_scheme(ga, gb, config)
    if config.output == "structured":
        _emit(to_json_lines(outcome, config, ga.n, timing=not args.deterministic), args.out)
    elif outcome.is_isomorphic:
        _emit(f"isomorphic\nmapping: {outcome.mapping}\n", args.out)
    else:
        _emit(f"not isomorphic or not reconstructible: {outcome.verdict.reason}\n", args.out)
    return 0 if outcome.is_isomorphic else 1


def cmd_trace(args) -> int:
    ga, gb = _load_pair(args)
    config = _config(args)
    outcome = run_base_scheme(ga, gb, config)
    if config.output == "structured":
        text = to_json_lines(outcome, config, ga.n, timing=not args.deterministic, partitions=True)
    else:
        text = render_human(outcome, ga.n, partitions=True)
    _emit(text, args.out)
    return 0 if outcome.is_isomorphic else 1


def _family_graph(family: str, args, rng: random.Random):
    if family == "gnp":
        return gnp(args.n, args.prob, rng.getrandbits(64))
    if family == "complete":
        return complete(args.n)
    if family == "torus":
        return torus(args.rows, args.cols)
    raise UsageError(f"unknown family {family!r}")


def nonisomorphic_partner(g, rng: random.Random, attempts: int = 20):
    """Perturbed relabelled copy, retried until the oracle rejects it (graphs like K_n may never get there).

    Mostly degree-preserving, so quick-reject rarely settles the pair on its own.
    """
    h = g
    for _ in range(attempts):
        _, h, _ = permuted_pair(g, rng.getrandbits(64))
        h = rewire(h, rng) if rng.random() < 0.75 else move_edge(h, rng)
        if brute_force_iso(g, h) is None:
            break
    return h


def cmd_hunt(args) -> int:
    config = _config(args)
    rng = random.Random(args.seed)
    counts = {(e, o): 0 for e in ("iso", "not") for o in ("iso", "not")}
    demotions = shortfalls = 0
    counterexamples = []
    for i in range(args.count):
        g = _family_graph(args.family, args, rng)
        if g.n > args.oracle_cap:
            raise UsageError(f"n={g.n} exceeds the oracle cap {args.oracle_cap}")
        if g.m == 0:
            g = complete(g.n) if g.n > 1 else g
        if i % 2 == 0:
            _, h, _ = permuted_pair(g, rng.getrandbits(64))
        else:
            h = nonisomorphic_partner(g, rng)
        outcome = run_base_scheme(g, h, config)
        truth = brute_force_iso(g, h) is not None
        e_key, o_key = ("iso" if outcome.is_isomorphic else "not"), ("iso" if truth else "not")
        counts[(e_key, o_key)] += 1
        if not outcome.is_isomorphic and outcome.verdict.demoted:
            demotions += 1
        elif not outcome.is_isomorphic and truth and outcome.verdict.bits_needed:
            shortfalls += 1  # an artifact of the mantissa width, not of the method
        elif not outcome.is_isomorphic and truth:
            counterexamples.append((i, g, h))
    dump_dir = Path(args.out or "counterexamples")
    for i, g, h in counterexamples:
        dump_dir.mkdir(parents=True, exist_ok=True)
        write_graph(g, str(dump_dir / f"pair{i:04d}_a.el"))
        write_graph(h, str(dump_dir / f"pair{i:04d}_b.el"))
    report = {
        "pairs": args.count,
        "engine_iso_oracle_iso": counts[("iso", "iso")],
        "engine_iso_oracle_not": counts[("iso", "not")],
        "engine_not_oracle_iso": counts[("not", "iso")],
        "engine_not_oracle_not": counts[("not", "not")],
        "internal_demotions": demotions,
        "precision_shortfalls": shortfalls,
        "counterexamples": len(counterexamples),
    }
    if args.format == "json-lines":
        sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        sys.stdout.write(
            "                 oracle iso  oracle not\n"
            f"engine iso     {report['engine_iso_oracle_iso']:10d}  {report['engine_iso_oracle_not']:10d}\n"
            f"engine not     {report['engine_not_oracle_iso']:10d}  {report['engine_not_oracle_not']:10d}\n"
            f"internal demotions: {demotions}\nprecision shortfalls: {shortfalls}\n"
            f"counterexamples: {len(counterexamples)}\n"
        )
        if counterexamples:
            sys.stdout.write(f"counterexample pairs written to {dump_dir}/\n")
    return 1 if counterexamples or shortfalls or counts[("iso", "not")] else 0


BENCH_FIELDS = ["family", "size", "n", "edges", "seconds", "n0", "iterations",
                "candidates", "sweeps_per_solve", "verdict"]


def bench_rows(family: str, sizes: list[int], config: RunConfig) -> list[dict]:
    rows = []
    for size in sizes:
        if family == "torus":
            g = torus(size, size)
        elif family == "complete":
            g = complete(size)
        else:
            raise UsageError(f"unknown bench family {family!r}")
        _, h, _ = permuted_pair(g, config.seed)
        t0 = time.perf_counter()
        outcome = run_base_scheme(g, h, config)
        elapsed = time.perf_counter() - t0
        iters = [r for r in outcome.trace if r.j > 0]
        rows.append({
            "family": family,
            "size": size,
            "n": g.n,
            "edges": g.m,
            "seconds": f"{elapsed:.6f}",
            "n0": outcome.n0,
            "iterations": len(iters),
            "candidates": sum(len(r.candidates_tried) for r in iters),
            "sweeps_per_solve": outcome.trace[0].sweeps if outcome.trace else 0,
            "verdict": "isomorphic" if outcome.is_isomorphic else "not",
        })
    return rows


def loglog_slope(rows: list[dict]) -> float | None:
    import numpy as np

    pts = [(math.log(r["n"]), math.log(float(r["seconds"]))) for r in rows if float(r["seconds"]) > 0]
    if len(pts) < 2:
        return None
    x, y = zip(*pts)
    return float(np.polyfit(x, y, 1)[0])


def cmd_bench(args) -> int:
    config = _config(args)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = bench_rows(args.family, sizes, config)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    slope = loglog_slope(rows)
    buf.write(f"# loglog_slope,{'' if slope is None else f'{slope:.3f}'}\n")
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_gen(args) -> int:
    params = {k: v for k, v in (("n", args.n), ("prob", args.prob), ("rows", args.rows),
                                ("cols", args.cols)) if v is not None}
    try:
        if args.kind == "pair":
            g, h, p = generate("regular_permuted_pair", seed=args.seed, base=args.base, **params)
        else:
            g = generate(args.kind, seed=args.seed, **params)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad generator parameters: {exc}") from exc
    if args.kind != "pair":
        if args.out:
            write_graph(g, args.out)
        else:
            sys.stdout.write(emit_edge_list(g))
        return 0
    if not args.out:
        raise UsageError("gen pair needs --out PREFIX")
    ext = ".g6" if args.out.endswith(".g6") else ".el"
    stem = args.out[: -len(ext)] if args.out.endswith(ext) else args.out
    write_graph(g, f"{stem}_a{ext}")
    write_graph(h, f"{stem}_b{ext}")
    # the first file maps onto the second by the inverse relabelling
    sys.stdout.write(f"{p.inverse()}\n")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["exact", "bigfloat"], default="exact")
    common.add_argument("--eps", choices=sorted(EPS_MODES), default="adaptive")
    common.add_argument("--mantissa-bits", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["human", "json-lines"], default="human")
    common.add_argument("--out", default=None)
    common.add_argument("--deterministic", action="store_true",
                        help="omit wall-clock timings from structured output")

    parser = argparse.ArgumentParser(prog="isoperturb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("test", cmd_test, "decide isomorphism of two graph files"),
                            ("trace", cmd_trace, "per-iteration trace with partitions")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file_a")
        p.add_argument("file_b")
        p.set_defaults(func=fn)

    p = sub.add_parser("gen", parents=[common], help="generate a graph or a permuted pair")
    p.add_argument("kind", choices=["complete", "gnp", "torus", "cycle", "path", "pair"])
    p.add_argument("--n", type=int)
    p.add_argument("--prob", type=float)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--base", default="torus")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("hunt", parents=[common], help="engine vs oracle on random pairs")
    p.add_argument("--family", choices=["gnp", "complete", "torus"], default="gnp")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--prob", type=float, default=0.5)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_hunt)

    p = sub.add_parser("bench", parents=[common], help="timing table as CSV")
    p.add_argument("--family", choices=["torus", "complete"], default="torus")
    p.add_argument("--sizes", default="3,4,5,6",
                   help="comma list: torus side lengths or complete-graph orders")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"isoperturb: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"isoperturb: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
