import math

import numpy as np
import pytest
from scipy.linalg import expm

from cvrp_aoa.ansatz import AnsatzConfig, build_ansatz
from cvrp_aoa.dense import DenseState, apply, probabilities
from cvrp_aoa.problem import Instance
from cvrp_aoa.subspace import SubspaceSim


def _inst2():
    return Instance.from_euclidean("two", 3, (0.0, 0.0),
                                   [(1.0, 0.0, 2), (0.0, 1.0, 2)])


def test_init_uniform_sizes(small3):
    sim = SubspaceSim(small3)
    psi = sim.init_uniform()
    assert psi.shape == (24,)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert np.all(psi == psi[0])


def test_init_uniform_n4(p2):
    sim = SubspaceSim(p2)
    psi = sim.init_uniform()
    assert psi.shape == (192,)
    assert psi[0] == pytest.approx(1 / math.sqrt(192))


def test_apply_phase_identity_and_equal_costs(small3):
    sim = SubspaceSim(small3)
    psi = sim.init_uniform()
    ref = psi.copy()
    sim.apply_phase(psi, 0.0)
    assert np.array_equal(psi, ref)
    sim.apply_phase(psi, 1.3)
    eq = np.abs(sim.costs - sim.costs[0]) <= 1e-9
    vals = psi[eq]
    assert np.max(np.abs(vals - vals[0])) < 1e-12


def test_apply_grover_eigenstate_and_unitarity(small3):
    sim = SubspaceSim(small3)
    psi = sim.init_uniform()
    sim.apply_grover(psi, 0.0)
    assert np.allclose(psi, sim.init_uniform())
    beta = 0.9
    sim.apply_grover(psi, beta)
    assert np.max(np.abs(psi - np.exp(-1j * beta) * sim.init_uniform())) < 1e-12
    rng = np.random.default_rng(4)
    for trial in range(10):
        v = rng.normal(size=sim.dim) + 1j * rng.normal(size=sim.dim)
        v /= np.linalg.norm(v)
        sim.apply_grover(v, rng.uniform(0, 2 * np.pi))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-9)


def test_apply_ring_norm_and_identity(small3):
    sim = SubspaceSim(small3)
    psi = sim.init_uniform()
    ref = psi.copy()
    sim.apply_ring(psi, 0.0)
    assert np.allclose(psi, ref)
    rng = np.random.default_rng(5)
    for trial in range(5):
        v = rng.normal(size=sim.dim) + 1j * rng.normal(size=sim.dim)
        v /= np.linalg.norm(v)
        sim.apply_ring(v, rng.uniform(0, 2 * np.pi))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-9)


def test_ring_single_term_against_expm_n2():
    # N=2 has two ring terms on one column pair; restrict the 4-qubit
    # matrix exponential to the two permutation labels and compare
    inst = _inst2()
    sim = SubspaceSim(inst)
    beta = 0.37

    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sp, sm = X + 1j * Y, X - 1j * Y

    def op(mats):
        out = np.eye(1)
        for m in reversed(mats):
            out = np.kron(m, out)
        return out

    h = op([sp, sp, sm, sm])
    h = h + h.conj().T
    u = expm(-1j * beta * h)
    # identity permutation occupies (x11, x22) -> local pattern q1=q2=1 (idx 3)
    # swapped permutation occupies (x12, x21) -> local pattern q3=q4=1 (idx 12)
    block = np.array([[u[3, 3], u[3, 12]], [u[12, 3], u[12, 12]]])

    # subspace: term applied twice (ring wraps i=1,2 and i=2,1 onto one pair),
    # then the single y qubit mixes within each permutation branch
    psi = np.zeros(sim.dim, dtype=complex)
    psi[0] = 1.0  # identity permutation, y = 0
    idx_id = 0
    idx_sw = sim.feas.perms.index((2, 1)) * sim.feas.n_y
    sim.apply_ring(psi, beta)
    ry = np.array([[math.cos(beta), -1j * math.sin(beta)],
                   [-1j * math.sin(beta), math.cos(beta)]])
    full = np.kron(block @ block, np.eye(2))
    y_mix = np.kron(np.eye(2), ry)
    want_vec = y_mix @ full @ np.array([1.0, 0, 0, 0])
    got_vec = np.array([psi[idx_id], psi[idx_id + 1], psi[idx_sw], psi[idx_sw + 1]])
    assert np.max(np.abs(got_vec - want_vec)) < 1e-10


def test_expectation_uniform_basis_bounds(small3):
    sim = SubspaceSim(small3)
    psi = sim.init_uniform()
    assert sim.expectation(psi) == pytest.approx(float(sim.costs.mean()))
    basis = np.zeros(sim.dim, dtype=complex)
    basis[5] = 1.0
    assert sim.expectation(basis) == pytest.approx(float(sim.costs[5]))
    rng = np.random.default_rng(6)
    v = rng.normal(size=sim.dim) + 1j * rng.normal(size=sim.dim)
    v /= np.linalg.norm(v)
    e = sim.expectation(v)
    assert sim.costs.min() - 1e-12 <= e <= sim.costs.max() + 1e-12


def test_distribution_normalization(small3):
    sim = SubspaceSim(small3)
    psi = sim.run_ansatz([0.4, 1.1], [0.8, 0.2], "grover")
    dist = sim.distribution(psi)
    assert len(dist) == 24
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(len(k) == 11 for k in dist)


@pytest.mark.parametrize("mixer", ["grover", "ring"])
def test_cross_backend_n2(mixer):
    inst = _inst2()
    sim = SubspaceSim(inst)
    rng = np.random.default_rng(9)
    for trial in range(4):
        p = int(rng.integers(1, 3))
        gs, bs = rng.uniform(0, 2 * np.pi, p), rng.uniform(0, 2 * np.pi, p)
        lay, circ = build_ansatz(AnsatzConfig(inst, p, mixer, "gate"), gs, bs)
        st = apply(DenseState(lay.n_qubits), circ)
        dense = probabilities(st, lay.decision_bits)
        sub = sim.distribution(sim.run_ansatz(gs, bs, mixer))
        for k in set(dense) | set(sub):
            assert dense.get(k, 0.0) == pytest.approx(sub.get(k, 0.0), abs=1e-8)
