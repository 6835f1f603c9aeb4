"""Gate data model for the statevector simulator.

Supported kinds: h, x, rx(theta), rz(theta), phase(theta) with an optional
control pattern, cnot, toffoli, mcx with an explicit control-state mask,
diag (diagonal phase exp(-i*gamma*table[subset bits])), and u4 (an arbitrary
16x16 unitary on four qubits).  Multi-controlled gates carry mixed 0/1
control masks directly instead of X sandwiches.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

CLASSICAL_KINDS = frozenset({"x", "cnot", "toffoli", "mcx"})
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    mask: tuple[int, ...] = ()
    param: float = 0.0
    matrix: np.ndarray | None = field(default=None, repr=False)
    table: np.ndarray | None = field(default=None, repr=False)
    subset: tuple[int, ...] = ()

    def __post_init__(self):
        allq = self.targets + self.controls + self.subset
        if any(q < 0 for q in allq):
            raise ValidationError(f"negative qubit index in {self.kind}")
        if len(set(self.controls)) != len(self.controls):
            raise ValidationError("duplicate control qubits")
        if set(self.controls) & set(self.targets):
            raise ValidationError("controls must be disjoint from targets")
        if len(self.mask) != len(self.controls) or any(b not in (0, 1) for b in self.mask):
            raise ValidationError("mask must give one 0/1 state per control")

    @property
    def max_qubit(self) -> int:
        return max(self.targets + self.controls + self.subset, default=0)


def h(q: int) -> Gate:
    return Gate("h", targets=(q,))


def x(q: int) -> Gate:
    return Gate("x", targets=(q,))


def rx(q: int, theta: float) -> Gate:
    return Gate("rx", targets=(q,), param=float(theta))


def rz(q: int, theta: float) -> Gate:
    return Gate("rz", targets=(q,), param=float(theta))


def ry(q: int, theta: float) -> list[Gate]:
    """RY(theta) expressed in the supported basis: RZ(-pi/2), RX(theta), RZ(pi/2)."""
    return [rz(q, -np.pi / 2), rx(q, theta), rz(q, np.pi / 2)]


def phase(theta: float, controls: tuple[int, ...], mask: tuple[int, ...]) -> Gate:
    """Multiply amplitudes by exp(i*theta) on basis states matching the mask."""
    return Gate("phase", controls=tuple(controls), mask=tuple(mask), param=float(theta))


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", targets=(target,), controls=(control,), mask=(1,))


def toffoli(c1: int, c2: int, target: int) -> Gate:
    return Gate("toffoli", targets=(target,), controls=(c1, c2), mask=(1, 1))


def mcx(controls: tuple[int, ...], mask: tuple[int, ...], target: int) -> Gate:
    if not controls:
        return x(target)
    return Gate("mcx", targets=(target,), controls=tuple(controls), mask=tuple(mask))


def diag(gamma: float, subset: tuple[int, ...], table: np.ndarray) -> Gate:
    table = np.asarray(table, dtype=float)
    if table.shape != (1 << len(subset),):
        raise ValidationError(
            f"diag table must have 2^{len(subset)} entries, got {table.shape}")
    return Gate("diag", subset=tuple(subset), param=float(gamma), table=table)


def u4(targets: tuple[int, ...], matrix: np.ndarray) -> Gate:
    targets = tuple(targets)
    if len(targets) != 4 or len(set(targets)) != 4:
        raise ValidationError("u4 needs four distinct target qubits")
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (16, 16):
        raise ValidationError("u4 matrix must be 16x16")
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(16))) > UNITARITY_TOL:
        raise ValidationError("u4 matrix is not unitary")
    return Gate("u4", targets=targets, matrix=matrix)


def adjoint(gate: Gate) -> Gate:
    if gate.kind in ("h", "x", "cnot", "toffoli", "mcx"):
        return gate
    if gate.kind in ("rx", "rz", "phase"):
        return Gate(gate.kind, targets=gate.targets, controls=gate.controls,
                    mask=gate.mask, param=-gate.param)
    if gate.kind == "diag":
        return Gate("diag", subset=gate.subset, param=-gate.param, table=gate.table)
    if gate.kind == "u4":
        return Gate("u4", targets=gate.targets, matrix=gate.matrix.conj().T)
    raise ValidationError(f"unknown gate kind {gate.kind!r}")


def adjoint_circuit(gates: list[Gate]) -> list[Gate]:
    return [adjoint(g) for g in reversed(gates)]


def is_classical(gates: list[Gate]) -> bool:
    return all(g.kind in CLASSICAL_KINDS for g in gates)


def circuit_width(gates: list[Gate]) -> int:
    return 1 + max((g.max_qubit for g in gates), default=-1)


def dump_circuit(gates: list[Gate]) -> str:
    """One gate per line: KIND targets... [controls.../mask] [params...]."""
    lines = []
    for g in gates:
        parts = [g.kind.upper()]
        parts += [str(t) for t in g.targets]
        if g.controls:
            parts.append("[" + ",".join(map(str, g.controls)) + "/"
                         + "".join(map(str, g.mask)) + "]")
        if g.kind == "diag":
            parts.append("subset=" + ",".join(map(str, g.subset)))
        if g.kind in ("rx", "rz", "phase", "diag"):
            parts.append(f"{g.param:.12g}")
        lines.append(" ".join(parts))
    return "\n".join(lines)
