"""Dense statevector simulation and the reversible basis-path evaluator."""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import ResourceLimitError, ValidationError
from .gates import CLASSICAL_KINDS, Gate

DENSE_MAX_QUBITS = 26
PROB_CUTOFF = 1e-16

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


class DenseState:
    """A 2^n complex amplitude vector, |0...0> by default.

    The amplitude buffer is owned exclusively while gates are applied; copy
    before sharing across threads.
    """

    def __init__(self, n: int, amps: np.ndarray | None = None):
        if n < 1:
            raise ValidationError("need at least one qubit")
        if n > DENSE_MAX_QUBITS:
            raise ResourceLimitError(
                f"dense simulation of {n} qubits exceeds the {DENSE_MAX_QUBITS}-qubit guard")
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=np.complex128)
            if amps.shape != (1 << n,):
                raise ValidationError(f"amplitude vector must have length 2^{n}")
        self.amps = amps

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _control_mask(gate: Gate) -> tuple[int, int]:
    cmask = 0
    cval = 0
    for q, b in zip(gate.controls, gate.mask):
        cmask |= 1 << q
        cval |= b << q
    return cmask, cval


def apply(state: DenseState, circuit: list[Gate]) -> DenseState:
    """Apply gates in order, mutating the state in place."""
    psi = state.amps
    n = state.n
    for g in circuit:
        if g.max_qubit >= n:
            raise ValidationError(f"gate {g.kind} touches qubit {g.max_qubit} of {n}")
        if g.kind == "h":
            kernels.single_qubit(psi, g.targets[0], _H)
        elif g.kind == "x":
            kernels.single_qubit(psi, g.targets[0], _X)
        elif g.kind == "rx":
            kernels.single_qubit(psi, g.targets[0], _rx_matrix(g.param))
        elif g.kind == "rz":
            kernels.single_qubit(psi, g.targets[0], _rz_matrix(g.param))
        elif g.kind == "phase":
            cmask, cval = _control_mask(g)
            kernels.phase_mask(psi, cmask, cval, np.exp(1j * g.param))
        elif g.kind in ("cnot", "toffoli", "mcx"):
            cmask, cval = _control_mask(g)
            kernels.mcx(psi, cmask, cval, 1 << g.targets[0])
        elif g.kind == "diag":
            keys = kernels.subset_keys(n, g.subset)
            phases = np.exp(-1j * g.param * g.table)
            kernels.diag_lookup(psi, keys, phases)
        elif g.kind == "u4":
            kernels.u4(psi, g.targets, g.matrix)
        else:
            raise ValidationError(f"unknown gate kind {g.kind!r}")
    return state


def probabilities(state: DenseState, subset: tuple[int, ...]) -> dict[str, float]:
    """Marginal distribution over a qubit subset.

    Keys are bitstrings with the most significant character being the highest
    qubit index in the subset; entries below 1e-16 are dropped.
    """
    subset = tuple(sorted(subset))
    if not subset or subset[-1] >= state.n:
        raise ValidationError("invalid qubit subset")
    keys = kernels.subset_keys(state.n, subset)
    probs = kernels.marginal(state.amps, keys, 1 << len(subset))
    m = len(subset)
    return {format(v, f"0{m}b"): float(p)
            for v, p in enumerate(probs) if p > PROB_CUTOFF}


def reversible_eval(label: int, circuit: list[Gate]) -> int:
    """Propagate a computational basis label through a classical circuit.

    Only {X, CNOT, Toffoli, MCX} are allowed; agrees with apply() restricted
    to basis inputs.
    """
    for g in circuit:
        if g.kind not in CLASSICAL_KINDS:
            raise ValidationError(f"gate {g.kind!r} is not classical-reversible")
        cmask, cval = _control_mask(g)
        if (label & cmask) == cval:
            label ^= 1 << g.targets[0]
    return label
