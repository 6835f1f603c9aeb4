"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ResourceLimitError, ValidationError
from .problem import (bundled_instance, exact_solve, generate_instances,
                      load_instance_file, validate_solution)


def _get_instance(ref: str):
    if ref in ("p1", "p2"):
        return bundled_instance(ref)
    return load_instance_file(ref)


def _write_or_print(text: str, out: str | None):
    if out:
        with open(out, "w") as f:
            f.write(text)
        print(f"wrote {out}")
    else:
        print(text)


def cmd_gen(args) -> int:
    instances = generate_instances(args.n, args.count, args.capacity,
                                   (args.demand_lo, args.demand_hi), args.seed)
    os.makedirs(args.out, exist_ok=True)
    for inst in instances:
        path = os.path.join(args.out, f"{inst.name}.json")
        with open(path, "w") as f:
            f.write(inst.to_json())
    print(f"wrote {len(instances)} instances to {args.out}")
    return 0


def cmd_solve_exact(args) -> int:
    inst = _get_instance(args.instance)
    res = exact_solve(inst)
    doc = {
        "instance": inst.name,
        "min_cost": res.min_cost,
        "optima": [{"routes": [list(r) for r in sol.routes],
                    "valid": validate_solution(sol, inst).ok}
                   for sol in res.optima],
    }
    _write_or_print(json.dumps(doc, indent=2), args.out)
    return 0


def cmd_run(args) -> int:
    from .harness import run_single

    inst = _get_instance(args.instance)
    result = run_single(inst, mixer=args.mixer, p=args.depth, backend=args.backend,
                        starts=args.starts, budget=args.budget, seed=args.seed)
    _write_or_print(result.to_json(), args.out)
    return 0


def cmd_baseline_qubo(args) -> int:
    from .qubo import run_qaoa

    inst = _get_instance(args.instance)
    result = run_qaoa(inst, p=args.depth, starts=args.starts, budget=args.budget,
                      seed=args.seed)
    _write_or_print(result.to_json(), args.out)
    return 0


def cmd_landscape(args) -> int:
    from .harness import landscape_scan

    inst = _get_instance(args.instance)
    try:
        n_gamma, n_beta = (int(v) for v in args.grid.lower().split("x"))
    except ValueError:
        raise ValidationError(f"grid must look like 64x64, got {args.grid!r}")
    grid = landscape_scan(inst, args.mixer, n_gamma, n_beta,
                          gamma_max=args.gamma_max, beta_max=args.beta_max)
    _write_or_print(grid.to_csv(), args.out)
    return 0


def cmd_experiment(args) -> int:
    from .harness import run_experiment

    outcome = run_experiment(args.preset, seed=args.seed)
    print(outcome.summary_table())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for k, run in enumerate(outcome.runs):
            path = os.path.join(args.out, f"{args.preset}-{k:03d}-{run.instance}.json")
            with open(path, "w") as f:
                f.write(run.to_json())
        with open(os.path.join(args.out, f"{args.preset}-summary.json"), "w") as f:
            json.dump(outcome.summary, f, indent=2)
        print(f"wrote {len(outcome.runs)} run files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvrp-aoa",
                                 description="Feasibility-preserving AOA solver for the CVRP")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--count", type=int, default=48)
    g.add_argument("--capacity", type=int, default=4)
    g.add_argument("--demand-lo", type=int, default=1)
    g.add_argument("--demand-hi", type=int, default=3)
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve-exact", help="brute-force optimum of an instance")
    s.add_argument("--instance", required=True, help="path or bundled name (p1, p2)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve_exact)

    r = sub.add_parser("run", help="optimize and evaluate an AOA circuit")
    r.add_argument("--instance", required=True)
    r.add_argument("--mixer", choices=("grover", "ring"), default="grover")
    r.add_argument("--depth", type=int, default=1)
    r.add_argument("--backend", choices=("gate", "subspace"), default="subspace")
    r.add_argument("--starts", type=int, default=20)
    r.add_argument("--budget", type=int, default=200)
    r.add_argument("--seed", type=int, default=7)
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("baseline-qubo", help="penalty-QAOA baseline run")
    b.add_argument("--instance", required=True)
    b.add_argument("--depth", type=int, default=1)
    b.add_argument("--starts", type=int, default=2)
    b.add_argument("--budget", type=int, default=30)
    b.add_argument("--seed", type=int, default=7)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_qubo)

    ls = sub.add_parser("landscape", help="depth-1 energy landscape CSV")
    ls.add_argument("--instance", required=True)
    ls.add_argument("--mixer", choices=("grover", "ring"), default="grover")
    ls.add_argument("--grid", default="64x64")
    ls.add_argument("--gamma-max", type=float, default=6.283185307179586)
    ls.add_argument("--beta-max", type=float, default=6.283185307179586)
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_landscape)

    e = sub.add_parser("experiment", help="run a bundled reference experiment")
    e.add_argument("--preset", required=True,
                   choices=("p1", "p2", "p2-depth2", "p3s", "qubo-compare"))
    e.add_argument("--seed", type=int, default=7)
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ResourceLimitError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
