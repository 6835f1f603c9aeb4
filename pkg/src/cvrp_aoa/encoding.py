"""Solution encoding and its classical semantics.

A candidate solution is a permutation matrix ``x`` (row t one-hot: the
customer served at time step t) plus unconstrained depot-return bits
``y_2..y_N``.  Decoding walks the permutation and opens a new sub-route
whenever y_t is set or the running load would exceed capacity, so every
encoding decodes to a solution satisfying all three CVRP constraints.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .problem import Instance, Solution, solution_cost

ENUMERATION_MAX_N = 8


@dataclass(frozen=True)
class Encoding:
    """Visit order (``order[t-1]`` = customer at step t) plus return bits y."""

    order: tuple[int, ...]
    y: tuple[int, ...]

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(1, n + 1)):
            raise ValidationError(f"order {self.order} is not a permutation of 1..{n}")
        if len(self.y) != max(n - 1, 0):
            raise ValidationError(f"y must have length {n - 1}, got {len(self.y)}")
        if any(b not in (0, 1) for b in self.y):
            raise ValidationError("y entries must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.order)

    def x_matrix(self) -> np.ndarray:
        n = self.n
        x = np.zeros((n, n), dtype=np.int8)
        for t, i in enumerate(self.order, start=1):
            x[t - 1, i - 1] = 1
        return x

    @classmethod
    def from_matrix(cls, x: np.ndarray, y: Sequence[int]) -> "Encoding":
        x = np.asarray(x)
        n = x.shape[0]
        if x.shape != (n, n):
            raise ValidationError("x must be square")
        if not (np.all(x.sum(axis=0) == 1) and np.all(x.sum(axis=1) == 1)):
            raise ValidationError("x must have one-hot rows and columns")
        order = tuple(int(np.argmax(x[t])) + 1 for t in range(n))
        return cls(order, tuple(int(b) for b in y))


def decode(enc: Encoding, demands: Sequence[int], capacity: int) -> Solution:
    """Decode an encoding into a route set.

    A new sub-route starts at step t when y_t = 1 or when serving the step-t
    customer would push the running load above capacity.
    """
    order, y = enc.order, enc.y
    i = order[0]
    edges: list[tuple[int, int]] = [(0, i)]
    d = demands[i - 1]
    for t in range(2, len(order) + 1):
        j = order[t - 1]
        if d + demands[j - 1] <= capacity and y[t - 2] == 0:
            edges.append((i, j))
            d += demands[j - 1]
        else:
            edges.append((i, 0))
            edges.append((0, j))
            d = demands[j - 1]
        i = j
    edges.append((i, 0))
    return Solution.from_edges(edges)


def route_cost(enc: Encoding, inst: Instance) -> float:
    """Cost C(x, y): total distance of the decoded route set."""
    return solution_cost(decode(enc, inst.demands, inst.capacity), inst.w)


@dataclass(frozen=True)
class ConditionTrace:
    """Classical trace of the condition-encoding pass.

    ``a[k]`` is the depot-visit flag for step t = k+2, ``d_values[t-1]`` the
    demand register after step t, and ``c_sets[t-1]`` the customers logged in
    the current sub-route after step t.
    """

    a: tuple[int, ...]
    d_values: tuple[int, ...]
    c_sets: tuple[frozenset, ...]


def condition_trace(enc: Encoding, demands: Sequence[int], capacity: int) -> ConditionTrace:
    """Run the condition-encoding algorithm classically.

    Per step: log the served demand into d, set a_t when y_t = 1 or d exceeds
    capacity, and on a_t = 1 recover d and the logged-customer set c so they
    describe only the new sub-route.
    """
    order, y = enc.order, enc.y
    n = len(order)
    d = 0
    a: list[int] = []
    logged: list[int] = []
    d_values: list[int] = []
    c_sets: list[frozenset] = []
    for t in range(1, n + 1):
        i = order[t - 1]
        d += demands[i - 1]
        if t != 1:
            a_t = 1 if (y[t - 2] == 1 or d > capacity) else 0
            a.append(a_t)
            if t != n and a_t == 1:
                for j in logged:
                    d -= demands[j - 1]
                logged = []
        if t != n:
            logged.append(i)
        d_values.append(d)
        c_sets.append(frozenset(logged))
    return ConditionTrace(tuple(a), tuple(d_values), tuple(c_sets))


def reformulated_cost(order: Sequence[int], a: Sequence[int], inst: Instance) -> float:
    """Cost as a function of the permutation and the condition bits a.

    Depot legs at a split are priced by the two single sums
    sum_i w[i,0] x[t-1,i] + sum_j w[0,j] x[t,j], and the final return leg is
    taken from the last time step.
    """
    n = len(order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValidationError(f"order {tuple(order)} is not a permutation of 1..{n}")
    if len(a) != n - 1 or any(b not in (0, 1) for b in a):
        raise ValidationError("a must be n-1 bits")
    w = inst.w
    total = float(w[0, order[0]]) + float(w[order[-1], 0])
    for t in range(2, n + 1):
        i, j = order[t - 2], order[t - 1]
        if a[t - 2]:
            total += float(w[i, 0]) + float(w[0, j])
        else:
            total += float(w[i, j])
    return total


class FeasibleSet:
    """Deterministic enumeration of all (permutation, y) encodings.

    Order is lexicographic with the permutation as the major key and the
    integer value of y (y_2 = least significant bit) as the minor key.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValidationError("N must be >= 1")
        if n > ENUMERATION_MAX_N:
            raise ResourceLimitError(
                f"feasible set has {n}!*2^{n - 1} elements; N <= {ENUMERATION_MAX_N} required")
        self.n = n
        self.n_y = 2 ** max(n - 1, 0)
        self.perms = list(itertools.permutations(range(1, n + 1)))
        self._rank = {p: r for r, p in enumerate(self.perms)}
        self.layout = bit_layout(n)

    def __len__(self) -> int:
        return len(self.perms) * self.n_y

    def encoding(self, idx: int) -> Encoding:
        rank, yv = divmod(idx, self.n_y)
        y = tuple((yv >> k) & 1 for k in range(self.n - 1))
        return Encoding(self.perms[rank], y)

    def index(self, enc: Encoding) -> int:
        yv = sum(b << k for k, b in enumerate(enc.y))
        return self._rank[enc.order] * self.n_y + yv

    def bitstring(self, idx: int) -> str:
        return self.layout.bitstring(self.encoding(idx))

    def __iter__(self):
        for idx in range(len(self)):
            yield self.encoding(idx)


def enumerate_feasible(n: int) -> FeasibleSet:
    return FeasibleSet(n)


@dataclass(frozen=True)
class BitLayout:
    """Canonical decision-qubit indices: x bit (t,i) then the y bits."""

    n: int

    @property
    def n_bits(self) -> int:
        return self.n * self.n + max(self.n - 1, 0)

    def x_bit(self, t: int, i: int) -> int:
        return (t - 1) * self.n + (i - 1)

    def y_bit(self, t: int) -> int:
        return self.n * self.n + (t - 2)

    def label(self, enc: Encoding) -> int:
        v = 0
        for t, i in enumerate(enc.order, start=1):
            v |= 1 << self.x_bit(t, i)
        for t in range(2, self.n + 1):
            if enc.y[t - 2]:
                v |= 1 << self.y_bit(t)
        return v

    def bitstring(self, enc: Encoding) -> str:
        """Text form, most significant bit = highest qubit index."""
        return format(self.label(enc), f"0{self.n_bits}b")

    def encoding_of_label(self, label: int) -> Encoding:
        n = self.n
        order = []
        for t in range(1, n + 1):
            row = [(label >> self.x_bit(t, i)) & 1 for i in range(1, n + 1)]
            if sum(row) != 1:
                raise ValidationError(f"row {t} of label {label:#x} is not one-hot")
            order.append(row.index(1) + 1)
        y = tuple((label >> self.y_bit(t)) & 1 for t in range(2, n + 1))
        return Encoding(tuple(order), y)


@lru_cache(maxsize=None)
def bit_layout(n: int) -> BitLayout:
    if n < 1:
        raise ValidationError("N must be >= 1")
    return BitLayout(n)
