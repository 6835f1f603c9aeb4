import math

import numpy as np
import pytest

from cvrp_aoa import gates as G
from cvrp_aoa.arith import (build_add_const, build_compare_flip, build_increment,
                            build_sub_const, ladder_increment, ttk_add)
from cvrp_aoa.dense import DenseState, apply, probabilities, reversible_eval
from cvrp_aoa.errors import ValidationError
from cvrp_aoa.gates import adjoint_circuit, dump_circuit


def _random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return DenseState(n, v / np.linalg.norm(v))


def _random_circuit(n, n_gates, rng, classical_only=False):
    gates = []
    kinds = ["x", "cnot", "toffoli", "mcx"] if classical_only else \
        ["h", "x", "rx", "rz", "phase", "cnot", "toffoli", "mcx", "u4"]
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        qs = rng.permutation(n)
        if kind == "h":
            gates.append(G.h(int(qs[0])))
        elif kind == "x":
            gates.append(G.x(int(qs[0])))
        elif kind == "rx":
            gates.append(G.rx(int(qs[0]), rng.uniform(0, 2 * np.pi)))
        elif kind == "rz":
            gates.append(G.rz(int(qs[0]), rng.uniform(0, 2 * np.pi)))
        elif kind == "phase":
            k = int(rng.integers(1, min(3, n) + 1))
            gates.append(G.phase(rng.uniform(0, 2 * np.pi),
                                 tuple(int(q) for q in qs[:k]),
                                 tuple(int(b) for b in rng.integers(0, 2, k))))
        elif kind == "cnot":
            gates.append(G.cnot(int(qs[0]), int(qs[1])))
        elif kind == "toffoli":
            gates.append(G.toffoli(int(qs[0]), int(qs[1]), int(qs[2])))
        elif kind == "mcx":
            k = int(rng.integers(1, min(3, n - 1) + 1))
            gates.append(G.mcx(tuple(int(q) for q in qs[:k]),
                               tuple(int(b) for b in rng.integers(0, 2, k)),
                               int(qs[k])))
        elif kind == "u4" and n >= 4:
            m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
            u, _ = np.linalg.qr(m)
            gates.append(G.u4(tuple(int(q) for q in qs[:4]), u))
    return gates


def test_hadamard_on_zero():
    st = apply(DenseState(1), [G.h(0)])
    assert np.allclose(st.amps, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_double_x_identity():
    st = _random_state(3, 1)
    ref = st.amps.copy()
    apply(st, [G.x(1), G.x(1)])
    assert np.allclose(st.amps, ref)


def test_diag_zero_gamma_identity():
    st = _random_state(3, 2)
    ref = st.amps.copy()
    table = np.arange(4, dtype=float)
    apply(st, [G.diag(0.0, (0, 2), table)])
    assert np.allclose(st.amps, ref)


def test_diag_applies_subset_phase():
    st = _random_state(3, 3)
    ref = st.amps.copy()
    table = np.array([0.0, 1.5, 2.0, 7.0])
    apply(st, [G.diag(0.5, (0, 2), table)])
    for i in range(8):
        key = (i & 1) | (((i >> 2) & 1) << 1)
        assert st.amps[i] == pytest.approx(ref[i] * np.exp(-0.5j * table[key]))


def test_norm_preservation_random_circuits():
    rng = np.random.default_rng(7)
    for trial in range(5):
        st = _random_state(5, 10 + trial)
        apply(st, _random_circuit(5, 30, rng))
        assert st.norm() == pytest.approx(1.0, abs=1e-9)


def test_adjoint_identity_random_circuits():
    rng = np.random.default_rng(8)
    for trial in range(5):
        st = _random_state(5, 20 + trial)
        ref = st.amps.copy()
        circ = _random_circuit(5, 25, rng)
        apply(st, circ + adjoint_circuit(circ))
        assert np.max(np.abs(st.amps - ref)) < 1e-9


def test_reversible_eval_basics():
    # control set: target flips
    assert reversible_eval(0b01, [G.cnot(0, 1)]) == 0b11
    # control clear: nothing
    assert reversible_eval(0b10, [G.cnot(0, 1)]) == 0b10
    # mask with zero-controls fires on zero state
    g = G.mcx((0, 1), (0, 1), 2)
    assert reversible_eval(0b010, [g]) == 0b110
    assert reversible_eval(0b011, [g]) == 0b011


def test_reversible_eval_rejects_nonclassical():
    with pytest.raises(ValidationError):
        reversible_eval(0, [G.h(0)])


def test_reversible_eval_inverse_property():
    rng = np.random.default_rng(9)
    circ = _random_circuit(6, 40, rng, classical_only=True)
    for label in rng.integers(0, 1 << 6, size=10):
        out = reversible_eval(int(label), circ + adjoint_circuit(circ))
        assert out == int(label)


def test_reversible_eval_agrees_with_apply():
    # a classical circuit permutes basis states; applying it once to a state
    # with a distinct coefficient per basis label verifies the permutation
    # for every label in one dense pass
    rng = np.random.default_rng(10)
    for n in (3, 6, 9, 12):
        circ = _random_circuit(n, 25, rng, classical_only=True)
        coeffs = np.arange(1, (1 << n) + 1, dtype=np.complex128)
        coeffs /= np.linalg.norm(coeffs)
        st = DenseState(n, coeffs.copy())
        apply(st, circ)
        perm = np.array([reversible_eval(label, circ) for label in range(1 << n)])
        assert np.array_equal(np.sort(perm), np.arange(1 << n))
        assert np.allclose(st.amps[perm], coeffs, atol=1e-12)


def test_increment_small_values():
    inc2 = build_increment(2)
    assert reversible_eval(0b11, list(inc2.gates)) == 0b00
    inc3 = build_increment(3)
    assert reversible_eval(5, list(inc3.gates)) == 6


def test_increment_exhaustive_with_borrow():
    for n in range(1, 7):
        inc = build_increment(n)
        assert all(g.kind in ("x", "cnot", "toffoli") for g in inc.gates)
        width = inc.width
        for v in range(1 << width):
            out = reversible_eval(v, list(inc.gates))
            d = v & ((1 << n) - 1)
            borrow = v >> n
            assert out & ((1 << n) - 1) == (d + 1) % (1 << n)
            assert out >> n == borrow  # borrowed bits restored


def test_increment_linear_gate_count():
    counts = [len(build_increment(n).gates) for n in range(1, 12)]
    assert all(c <= 16 * n for n, c in zip(range(1, 12), counts))
    # constant increment per extra qubit once the borrowed construction kicks in
    diffs = {counts[n] - counts[n - 1] for n in range(4, 11)}
    assert len(diffs) == 1


def test_ttk_add_exhaustive():
    for n in (1, 2, 3, 4):
        gates = ttk_add(tuple(range(n)), tuple(range(n, 2 * n)))
        for a in range(1 << n):
            for b in range(1 << n):
                out = reversible_eval(a | (b << n), gates)
                assert out & ((1 << n) - 1) == a
                assert out >> n == (a + b) % (1 << n)


def test_add_const_examples():
    assert build_add_const(3, 0).gates == ()
    add = build_add_const(4, 5)
    out = reversible_eval(2, list(add.gates))
    assert out & 0b1111 == 7


def test_add_const_exhaustive():
    for n in range(1, 6):
        for k in range(1 << n):
            add = build_add_const(n, k)
            for v in range(1 << add.width):
                out = reversible_eval(v, list(add.gates))
                assert out & ((1 << n) - 1) == ((v & ((1 << n) - 1)) + k) % (1 << n)
                assert out >> n == v >> n


def test_add_then_sub_identity():
    for n, k in ((3, 5), (5, 19), (4, 9)):
        circ = list(build_add_const(n, k).gates) + list(build_sub_const(n, k).gates)
        for v in range(0, 1 << n, 3):
            assert reversible_eval(v, circ) == v


def test_ladder_increment_controlled():
    bits = (0, 1, 2)
    gates = ladder_increment(bits, controls=(3,))
    for v in range(8):
        assert reversible_eval(v | 8, gates) & 7 == (v + 1) % 8
        assert reversible_eval(v, gates) == v  # control clear


def test_compare_flip_figure_example():
    # constant 9 over 5 bits: three gates with control states 1, 011, 0101
    gates = build_compare_flip(5, 9)
    assert len(gates) == 3
    assert [g.mask for g in gates] == [(1,), (0, 1, 1), (0, 1, 0, 1)]
    assert [g.controls for g in gates] == [(4,), (4, 3, 2), (4, 3, 2, 1)]
    for d in range(32):
        out = reversible_eval(d, gates)
        assert (out >> 5) & 1 == (1 if d > 9 else 0)


def test_compare_flip_exhaustive():
    for k_bits in (2, 3, 4):
        for q in range(1 << k_bits):
            gates = build_compare_flip(k_bits, q)
            for d in range(1 << k_bits):
                out = reversible_eval(d, gates)
                assert (out >> k_bits) & 1 == (1 if d > q else 0)


def test_compare_flip_max_constant_empty():
    assert build_compare_flip(4, 15) == []


def test_probabilities_basis_and_uniform():
    st = DenseState(3)
    assert probabilities(st, (0, 1, 2)) == {"000": 1.0}
    apply(st, [G.h(q) for q in range(3)])
    probs = probabilities(st, (0, 1, 2))
    assert len(probs) == 8
    assert all(p == pytest.approx(1 / 8) for p in probs.values())
    marg = probabilities(st, (1,))
    assert sum(marg.values()) == pytest.approx(1.0, abs=1e-9)


def test_probabilities_key_orientation():
    # qubit 2 set: subset (0, 2) reads '10' (MSB = higher qubit index)
    st = DenseState(3)
    apply(st, [G.x(2)])
    assert probabilities(st, (0, 2)) == {"10": 1.0}


def test_gate_validation():
    with pytest.raises(ValidationError):
        G.u4((0, 1, 2, 3), np.eye(16) * 2.0)
    with pytest.raises(ValidationError):
        G.mcx((1, 1), (1, 1), 0)
    with pytest.raises(ValidationError):
        G.mcx((0,), (1,), 0)
    with pytest.raises(ValidationError):
        G.diag(1.0, (0, 1), np.zeros(3))


def test_dump_circuit_format():
    text = dump_circuit([G.h(0), G.mcx((2, 1), (0, 1), 3), G.rx(1, 0.5)])
    lines = text.splitlines()
    assert lines[0] == "H 0"
    assert lines[1] == "MCX 3 [2,1/01]"
    assert lines[2] == "RX 1 0.5"
