"""Exact simulator restricted to the feasible subspace.

States are complex vectors over the N!*2^(N-1) feasible encodings in
enumeration order.  The phase layer is a diagonal multiply by the decoded
route cost, the Grover mixer a rank-one update against the uniform vector,
and each ring-mixer term an exact two-level rotation between the two
row-swapped permutation labels it couples.  This reproduces the gate
backend's decision-register distribution exactly while scaling with the
feasible count instead of 2^n.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .ansatz import ring_terms
from .encoding import enumerate_feasible, route_cost
from .errors import ValidationError
from .problem import Instance


@lru_cache(maxsize=8)
def _ring_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per ring term, index pairs (A, B) coupled by that term, precomputed
    once per problem size.  A holds the labels with sigma(i)=u, sigma(j)=v;
    B the row-swapped partners."""
    feas = enumerate_feasible(n)
    rank = {p: r for r, p in enumerate(feas.perms)}
    n_y = feas.n_y
    yv = np.arange(n_y, dtype=np.int64)
    out = []
    for (i, j, u, v) in ring_terms(n):
        ra, rb = [], []
        for r, perm in enumerate(feas.perms):
            if perm[i - 1] == u and perm[j - 1] == v:
                swapped = list(perm)
                swapped[i - 1], swapped[j - 1] = v, u
                ra.append(r)
                rb.append(rank[tuple(swapped)])
        a = (np.array(ra, dtype=np.int64)[:, None] * n_y + yv).ravel()
        b = (np.array(rb, dtype=np.int64)[:, None] * n_y + yv).ravel()
        out.append((a, b))
    return out


@lru_cache(maxsize=8)
def _y_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    feas = enumerate_feasible(n)
    n_y = feas.n_y
    idx = np.arange(len(feas), dtype=np.int64)
    out = []
    for t in range(2, n + 1):
        bit = 1 << (t - 2)
        a = idx[(idx % n_y) & bit == 0]
        out.append((a, a + bit))
    return out


def _rotate(psi: np.ndarray, a: np.ndarray, b: np.ndarray, angle: float) -> None:
    # exp(-i*angle*X) on each (a, b) amplitude pair
    c = np.cos(angle)
    s = np.sin(angle)
    va = psi[a]
    vb = psi[b]
    psi[a] = c * va - 1j * s * vb
    psi[b] = -1j * s * va + c * vb


class SubspaceSim:
    """Feasible-subspace backend for one instance."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.n = inst.n
        self.feas = enumerate_feasible(inst.n)
        self.costs = np.array([route_cost(enc, inst) for enc in self.feas])
        self._bitstrings: list[str] | None = None

    @property
    def dim(self) -> int:
        return len(self.feas)

    def init_uniform(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / np.sqrt(self.dim), dtype=np.complex128)

    def apply_phase(self, psi: np.ndarray, gamma: float) -> np.ndarray:
        psi *= np.exp(-1j * gamma * self.costs)
        return psi

    def apply_grover(self, psi: np.ndarray, beta: float) -> np.ndarray:
        # psi -= (1 - e^{-i beta}) <u|psi> u with u the uniform vector
        psi -= (1 - np.exp(-1j * beta)) * psi.sum() / self.dim
        return psi

    def apply_ring(self, psi: np.ndarray, beta: float) -> np.ndarray:
        for a, b in _ring_pairs(self.n):
            if a.size:
                _rotate(psi, a, b, 16 * beta)
        for a, b in _y_pairs(self.n):
            _rotate(psi, a, b, beta)
        return psi

    def apply_mixer(self, psi: np.ndarray, beta: float, mixer: str) -> np.ndarray:
        if mixer == "grover":
            return self.apply_grover(psi, beta)
        if mixer == "ring":
            return self.apply_ring(psi, beta)
        raise ValidationError(f"unknown mixer {mixer!r}")

    def run_ansatz(self, gammas, betas, mixer: str = "grover") -> np.ndarray:
        psi = self.init_uniform()
        for g, b in zip(gammas, betas):
            self.apply_phase(psi, g)
            self.apply_mixer(psi, b, mixer)
        return psi

    def expectation(self, psi: np.ndarray) -> float:
        return float((np.abs(psi) ** 2) @ self.costs)

    def bitstrings(self) -> list[str]:
        if self._bitstrings is None:
            self._bitstrings = [self.feas.bitstring(i) for i in range(self.dim)]
        return self._bitstrings

    def distribution(self, psi: np.ndarray) -> dict[str, float]:
        probs = np.abs(psi) ** 2
        return {s: float(p) for s, p in zip(self.bitstrings(), probs)}
