"""Reversible arithmetic composites: incrementer, constant adders, comparator.

``build_increment`` keeps an O(n) gate count over {Toffoli, CNOT, X} by using
a ripple adder against a bank of borrowed qubits (restored afterwards) for
wide registers.  The comparator flips a flag qubit whenever the value
register exceeds a constant, one multi-controlled X per zero bit of the
constant's binary form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .gates import Gate, adjoint_circuit, cnot, mcx, toffoli, x


@dataclass(frozen=True)
class ArithCircuit:
    """A gate list plus its register map: value bits first, then any borrowed
    bits (arbitrary incoming states, restored on output)."""

    gates: tuple[Gate, ...]
    n_value: int
    n_borrowed: int

    @property
    def width(self) -> int:
        return self.n_value + self.n_borrowed


def ttk_add(a_bits: tuple[int, ...], b_bits: tuple[int, ...]) -> list[Gate]:
    """Ripple adder |a>|b> -> |a>|a+b mod 2^n> in Toffoli/CNOT gates."""
    n = len(a_bits)
    if len(b_bits) != n or n < 1:
        raise ValidationError("ttk_add needs two equal-width registers")
    a, b = a_bits, b_bits
    g: list[Gate] = []
    for i in range(1, n):
        g.append(cnot(a[i], b[i]))
    for i in reversed(range(1, n - 1)):
        g.append(cnot(a[i], a[i + 1]))
    for i in range(n - 1):
        g.append(toffoli(b[i], a[i], a[i + 1]))
    for i in reversed(range(1, n)):
        g.append(cnot(a[i], b[i]))
        g.append(toffoli(b[i - 1], a[i - 1], a[i]))
    for i in range(1, n - 1):
        g.append(cnot(a[i], a[i + 1]))
    for i in range(n):
        g.append(cnot(a[i], b[i]))
    return g


def build_increment(n: int) -> ArithCircuit:
    """|d> -> |(d+1) mod 2^n> on value bits 0..n-1.

    Widths up to 3 use the plain carry ladder; wider registers subtract a
    borrowed register g and its bit complement, which adds 2^n - 1 = -1
    regardless of g's state and restores it.
    """
    if n < 1:
        raise ValidationError("register width must be >= 1")
    if n == 1:
        return ArithCircuit((x(0),), 1, 0)
    if n == 2:
        return ArithCircuit((cnot(0, 1), x(0)), 2, 0)
    if n == 3:
        return ArithCircuit((toffoli(0, 1, 2), cnot(0, 1), x(0)), 3, 0)
    value = tuple(range(n))
    borrow = tuple(range(n, 2 * n))
    sub = adjoint_circuit(ttk_add(borrow, value))
    g: list[Gate] = []
    g += sub
    g += [x(q) for q in borrow]
    g += sub
    g += [x(q) for q in borrow]
    return ArithCircuit(tuple(g), n, n)


def _remap(gates, mapping: dict[int, int]) -> list[Gate]:
    out = []
    for g in gates:
        out.append(Gate(g.kind,
                        targets=tuple(mapping[q] for q in g.targets),
                        controls=tuple(mapping[q] for q in g.controls),
                        mask=g.mask, param=g.param, matrix=g.matrix,
                        table=g.table,
                        subset=tuple(mapping[q] for q in g.subset)))
    return out


def build_add_const(n: int, k: int) -> ArithCircuit:
    """|d> -> |(d+k) mod 2^n>, a product of incrementers over the set bits
    of k, each acting on the top n-b qubits of the register."""
    if not (0 <= k < (1 << n)):
        raise ValidationError(f"constant {k} out of range for {n} bits")
    gates: list[Gate] = []
    n_borrowed = 0
    for b in range(n):
        if not (k >> b) & 1:
            continue
        inc = build_increment(n - b)
        mapping = {i: b + i for i in range(inc.n_value)}
        for j in range(inc.n_borrowed):
            mapping[inc.n_value + j] = n + j
        n_borrowed = max(n_borrowed, inc.n_borrowed)
        gates += _remap(inc.gates, mapping)
    return ArithCircuit(tuple(gates), n, n_borrowed)


def build_sub_const(n: int, k: int) -> ArithCircuit:
    """Adjoint of build_add_const: |d> -> |(d-k) mod 2^n>."""
    add = build_add_const(n, k)
    return ArithCircuit(tuple(adjoint_circuit(list(add.gates))), add.n_value, add.n_borrowed)


def build_compare_flip(k_bits: int, q_const: int, target: int | None = None,
                       d_bits: tuple[int, ...] | None = None,
                       extra_controls: tuple[int, ...] = (),
                       extra_mask: tuple[int, ...] = ()) -> list[Gate]:
    """Flip ``target`` iff the value register holds a number > q_const.

    One MCX per zero bit i of the constant: controls d_{K-1}..d_i whose
    required states are the constant's upper bits followed by a 1.
    ``extra_controls`` prepends additional control qubits to every gate.
    """
    if d_bits is None:
        d_bits = tuple(range(k_bits))
    if target is None:
        target = k_bits
    if len(d_bits) != k_bits:
        raise ValidationError("d register width mismatch")
    if not (0 <= q_const < (1 << k_bits)):
        raise ValidationError(f"comparator constant {q_const} out of range for {k_bits} bits")
    gates: list[Gate] = []
    for i in reversed(range(k_bits)):
        if (q_const >> i) & 1:
            continue
        controls = tuple(extra_controls) + tuple(d_bits[j] for j in range(k_bits - 1, i - 1, -1))
        mask = tuple(extra_mask) + tuple((q_const >> j) & 1 for j in range(k_bits - 1, i, -1)) + (1,)
        gates.append(mcx(controls, mask, target))
    return gates


def ladder_increment(bits: tuple[int, ...], controls: tuple[int, ...] = ()) -> list[Gate]:
    """Carry-ladder [+1] on ``bits`` (bits[0] = LSB), optionally controlled.

    Uses one native multi-controlled X per register bit; used inside larger
    composites where the simulator applies MCX by amplitude masking.
    """
    gates: list[Gate] = []
    m = len(bits)
    ones = (1,) * len(controls)
    for j in range(m - 1, 0, -1):
        ctr = tuple(controls) + tuple(bits[:j])
        gates.append(mcx(ctr, ones + (1,) * j, bits[j]))
    gates.append(mcx(tuple(controls), ones, bits[0]))
    return gates


def controlled_add_const(bits: tuple[int, ...], k: int,
                         controls: tuple[int, ...]) -> list[Gate]:
    """Controlled |d> -> |d + k mod 2^len(bits)> via per-set-bit ladders."""
    if not (0 <= k < (1 << len(bits))):
        raise ValidationError(f"constant {k} out of range")
    gates: list[Gate] = []
    for b in range(len(bits)):
        if (k >> b) & 1:
            gates += ladder_increment(bits[b:], controls)
    return gates


def demand_register_width(capacity: int, max_demand: int) -> int:
    """Qubits needed to track running demand: ceil(log2(Q + max(q) + 1))."""
    return max(1, math.ceil(math.log2(capacity + max_demand + 1)))
