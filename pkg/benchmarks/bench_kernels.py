"""Benchmark the numba kernels against the pure-numpy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py [--qubits 20] [--repeats 5]

Covers the hot paths: single-qubit butterflies, multi-controlled X,
four-qubit unitaries, the diagonal-phase lookup, and the QUBO penalty
table build.  The numpy column is what you get with CVRP_AOA_NO_NUMBA=1.
"""
import argparse
import time

import numpy as np

from cvrp_aoa import kernels
from cvrp_aoa.problem import generate_instances
from cvrp_aoa.qubo import PenaltyConfig, QuboLayout, _tables_numpy, build_tables


def _rand_state(n, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return (v / np.linalg.norm(v)).astype(np.complex128)


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_gates(n, repeats):
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    rng = np.random.default_rng(1)
    u, _ = np.linalg.qr(rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
    rows = []

    def single_np():
        psi = _rand_state(n)
        for q in range(n):
            kernels._single_qubit_np(psi, q, h)

    def single_nb():
        psi = _rand_state(n)
        for q in range(n):
            kernels.single_qubit(psi, q, h)

    def mcx_np():
        psi = _rand_state(n)
        for q in range(n - 3):
            kernels._mcx_np(psi, 0b111 << q, 0b101 << q, 1 << (n - 1))

    def mcx_nb():
        psi = _rand_state(n)
        for q in range(n - 3):
            kernels.mcx(psi, 0b111 << q, 0b101 << q, 1 << (n - 1))

    def u4_np():
        psi = _rand_state(n)
        for q in range(0, n - 4, 2):
            kernels._u4_np(psi, (q, q + 1, q + 2, q + 3), u)

    def u4_nb():
        psi = _rand_state(n)
        for q in range(0, n - 4, 2):
            kernels.u4(psi, (q, q + 1, q + 2, q + 3), u)

    keys = kernels.subset_keys(n, tuple(range(n // 2)))
    phases = np.exp(1j * np.linspace(0, 2, 1 << (n // 2)))

    def diag():
        psi = _rand_state(n)
        kernels.diag_lookup(psi, keys, phases)

    rows.append((f"{n} single-qubit gates ({n} qubits)", single_np, single_nb))
    rows.append((f"{n - 3} MCX gates ({n} qubits)", mcx_np, mcx_nb))
    rows.append((f"{(n - 4) // 2 + 1} four-qubit unitaries", u4_np, u4_nb))
    rows.append(("diagonal phase lookup", diag, diag))
    out = []
    for name, f_np, f_nb in rows:
        t_np = _time(f_np, repeats)
        t_nb = _time(f_nb, repeats) if kernels.USE_NUMBA else float("nan")
        out.append((name, t_np, t_nb))
    return out


def bench_qubo_tables(repeats):
    inst = generate_instances(3, 1, 3, (1, 2), seed=11)[0]
    layout = QuboLayout.for_instance(inst)
    cfg = PenaltyConfig.default_for(inst)
    t_np = _time(lambda: _tables_numpy(inst, layout, cfg), repeats)
    t_nb = _time(lambda: build_tables(inst, layout, cfg), repeats) \
        if kernels.USE_NUMBA else float("nan")
    return [(f"QUBO penalty table ({layout.n_qubits} qubits)", t_np, t_nb)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--qubits", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not kernels.USE_NUMBA:
        print("note: numba path inactive (missing numba or CVRP_AOA_NO_NUMBA set); "
              "only the numpy column is meaningful\n")
    rows = bench_gates(args.qubits, args.repeats) + bench_qubo_tables(args.repeats)
    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        speed = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{name:<{width}}  {t_np * 1e3:>8.1f}ms  {t_nb * 1e3:>8.1f}ms  {speed:>7.1f}x")


if __name__ == "__main__":
    main()
