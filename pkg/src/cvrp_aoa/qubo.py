"""Penalty-QUBO QAOA baseline.

Decision bit z_{t,i,k} assigns customer i to time step t on vehicle k, with
the vehicle count fixed to ceil(sum(q)/Q).  Constraints enter as squared
Lagrange penalties (one visit per customer, one customer per global time
step, per-vehicle capacity with binary slack), and the circuit is the
conventional QAOA: Hadamard initialization, the penalized cost as the phase
diagonal, and an X mixer on every qubit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ResourceLimitError, ValidationError
from .harness import COST_CLASS_TOL, Metrics, RunResult, optimize
from .problem import Instance, exact_solve

QUBO_MAX_QUBITS = 24


@dataclass(frozen=True)
class QuboLayout:
    n: int
    n_vehicles: int
    capacity: int
    slack_width: int

    @classmethod
    def for_instance(cls, inst: Instance) -> "QuboLayout":
        k = max(1, math.ceil(sum(inst.demands) / inst.capacity))
        return cls(n=inst.n, n_vehicles=k, capacity=inst.capacity,
                   slack_width=max(1, math.ceil(math.log2(inst.capacity + 1))))

    def z_bit(self, t: int, i: int, k: int) -> int:
        return ((t - 1) * self.n + (i - 1)) * self.n_vehicles + (k - 1)

    def slack_bit(self, k: int, j: int) -> int:
        return self.n * self.n * self.n_vehicles + (k - 1) * self.slack_width + j

    @property
    def n_qubits(self) -> int:
        return self.n * self.n * self.n_vehicles + self.n_vehicles * self.slack_width


@dataclass(frozen=True)
class PenaltyConfig:
    lam_visit: float
    lam_step: float
    mu_cap: float

    def __post_init__(self):
        if min(self.lam_visit, self.lam_step, self.mu_cap) <= 0:
            raise ValidationError("penalty multipliers must be positive")

    @classmethod
    def default_for(cls, inst: Instance) -> "PenaltyConfig":
        # strictly dominates any route-cost gain from one violated constraint
        m = 2.0 * inst.n * float(inst.w.max())
        return cls(lam_visit=m, lam_step=m, mu_cap=m)


def _decode_parts(bits: int, inst: Instance, layout: QuboLayout):
    """Route cost, penalty groups, and plan feasibility for one bit pattern."""
    n, nk = layout.n, layout.n_vehicles
    q, w, cap = inst.demands, inst.w, inst.capacity
    route_cost = 0.0
    loads = [0] * (nk + 1)
    visit_cnt = [0] * (n + 1)
    step_cnt = [0] * (n + 1)
    wellformed = True
    for k in range(1, nk + 1):
        prev = 0
        used = False
        for t in range(1, n + 1):
            cnt = 0
            cust = 0
            for i in range(1, n + 1):
                if (bits >> layout.z_bit(t, i, k)) & 1:
                    cnt += 1
                    cust = i
                    loads[k] += q[i - 1]
                    visit_cnt[i] += 1
                    step_cnt[t] += 1
            if cnt == 1:
                route_cost += float(w[prev, cust])
                prev = cust
                used = True
            elif cnt > 1:
                wellformed = False
        if used:
            route_cost += float(w[prev, 0])
    pen_visit = sum((visit_cnt[i] - 1) ** 2 for i in range(1, n + 1))
    pen_step = sum((step_cnt[t] - 1) ** 2 for t in range(1, n + 1))
    pen_cap = 0
    for k in range(1, nk + 1):
        slack = 0
        for j in range(layout.slack_width):
            slack += ((bits >> layout.slack_bit(k, j)) & 1) << j
        pen_cap += (loads[k] + slack - cap) ** 2
    feasible = (wellformed and pen_visit == 0 and pen_step == 0
                and all(loads[k] <= cap for k in range(1, nk + 1)))
    return route_cost, pen_visit, pen_step, pen_cap, feasible


def penalty_cost(bits: int, inst: Instance, cfg: PenaltyConfig,
                 layout: QuboLayout | None = None) -> float:
    """Route cost plus squared penalties for the given bit pattern (an
    integer whose bit q is qubit q)."""
    layout = layout or QuboLayout.for_instance(inst)
    if bits < 0 or bits >= (1 << layout.n_qubits):
        raise ValidationError("bit pattern width mismatch")
    rc, pv, ps, pc, _ = _decode_parts(bits, inst, layout)
    return rc + cfg.lam_visit * pv + cfg.lam_step * ps + cfg.mu_cap * pc


def plan_feasible(bits: int, inst: Instance, layout: QuboLayout | None = None) -> bool:
    """Whether the plan bits decode to a CVRP-feasible solution (slack ignored)."""
    layout = layout or QuboLayout.for_instance(inst)
    return _decode_parts(bits, inst, layout)[4]


@kernels.maybe_njit(cache=True)
def _tables_kernel(n, nk, slack_width, cap, q, w, lam_v, lam_s, mu_c,
                   cost, route, feas):  # pragma: no cover - jitted
    n_states = cost.size
    for bits in range(n_states):
        route_cost = 0.0
        pen_visit = 0
        pen_step = 0
        pen_cap = 0
        ok = True
        for i in range(n):
            cnt_i = 0
            for t in range(n):
                for k in range(nk):
                    cnt_i += (bits >> ((t * n + i) * nk + k)) & 1
            pen_visit += (cnt_i - 1) * (cnt_i - 1)
        for t in range(n):
            cnt_t = 0
            for i in range(n):
                for k in range(nk):
                    cnt_t += (bits >> ((t * n + i) * nk + k)) & 1
            pen_step += (cnt_t - 1) * (cnt_t - 1)
            if cnt_t != 1:
                ok = False
        for k in range(nk):
            load = 0
            prev = 0
            used = False
            for t in range(n):
                cnt = 0
                cust = 0
                for i in range(n):
                    if (bits >> ((t * n + i) * nk + k)) & 1:
                        cnt += 1
                        cust = i + 1
                        load += q[i]
                if cnt == 1:
                    route_cost += w[prev, cust]
                    prev = cust
                    used = True
                elif cnt > 1:
                    ok = False
            if used:
                route_cost += w[prev, 0]
            if load > cap:
                ok = False
            slack = 0
            for j in range(slack_width):
                slack += ((bits >> (n * n * nk + k * slack_width + j)) & 1) << j
            d = load + slack - cap
            pen_cap += d * d
        if pen_visit != 0:
            ok = False
        cost[bits] = route_cost + lam_v * pen_visit + lam_s * pen_step + mu_c * pen_cap
        route[bits] = route_cost
        feas[bits] = ok


def _tables_numpy(inst: Instance, layout: QuboLayout, cfg: PenaltyConfig):
    n, nk = layout.n, layout.n_vehicles
    q, w, cap = inst.demands, inst.w, inst.capacity
    size = 1 << layout.n_qubits
    ar = np.arange(size, dtype=np.int64)
    zbits = {}
    for t in range(1, n + 1):
        for i in range(1, n + 1):
            for k in range(1, nk + 1):
                zbits[(t, i, k)] = ((ar >> layout.z_bit(t, i, k)) & 1).astype(np.int8)
    route = np.zeros(size)
    pen_visit = np.zeros(size, dtype=np.int64)
    pen_step = np.zeros(size, dtype=np.int64)
    pen_cap = np.zeros(size, dtype=np.int64)
    ok = np.ones(size, dtype=bool)
    for i in range(1, n + 1):
        cnt = sum(zbits[(t, i, k)].astype(np.int64)
                  for t in range(1, n + 1) for k in range(1, nk + 1))
        pen_visit += (cnt - 1) ** 2
        ok &= cnt == 1
    for t in range(1, n + 1):
        cnt = sum(zbits[(t, i, k)].astype(np.int64)
                  for i in range(1, n + 1) for k in range(1, nk + 1))
        pen_step += (cnt - 1) ** 2
        ok &= cnt == 1
    for k in range(1, nk + 1):
        load = np.zeros(size, dtype=np.int64)
        prev = np.zeros(size, dtype=np.int64)
        used = np.zeros(size, dtype=bool)
        for t in range(1, n + 1):
            cnt = np.zeros(size, dtype=np.int64)
            cust = np.zeros(size, dtype=np.int64)
            for i in range(1, n + 1):
                z = zbits[(t, i, k)]
                cnt += z
                cust += i * z
                load += q[i - 1] * z
            valid = cnt == 1
            ok &= cnt <= 1
            route += np.where(valid, w[prev, np.where(valid, cust, 0)], 0.0)
            prev = np.where(valid, cust, prev)
            used |= valid
        route += np.where(used, w[prev, np.zeros(size, dtype=np.int64)], 0.0)
        ok &= load <= cap
        slack = np.zeros(size, dtype=np.int64)
        for j in range(layout.slack_width):
            slack += ((ar >> layout.slack_bit(k, j)) & 1) << j
        pen_cap += (load + slack - cap) ** 2
    cost = route + cfg.lam_visit * pen_visit + cfg.lam_step * pen_step + cfg.mu_cap * pen_cap
    return cost, route, ok


def build_tables(inst: Instance, layout: QuboLayout, cfg: PenaltyConfig):
    """Penalized cost, bare route cost, and plan-feasibility arrays over all
    2^n_q bit patterns."""
    if kernels.USE_NUMBA:
        size = 1 << layout.n_qubits
        cost = np.empty(size)
        route = np.empty(size)
        feas = np.empty(size, dtype=np.bool_)
        _tables_kernel(layout.n, layout.n_vehicles, layout.slack_width,
                       inst.capacity, np.array(inst.demands, dtype=np.int64),
                       np.ascontiguousarray(inst.w),
                       cfg.lam_visit, cfg.lam_step, cfg.mu_cap,
                       cost, route, feas)
        return cost, route, feas
    return _tables_numpy(inst, layout, cfg)


def _apply_layer(psi: np.ndarray, n_qubits: int, cost: np.ndarray,
                 gamma: float, beta: float) -> None:
    psi *= np.exp(-1j * gamma * cost)
    c, s = math.cos(beta), math.sin(beta)
    u = np.array([[c, -1j * s], [-1j * s, c]])  # RX(2*beta)
    for q in range(n_qubits):
        kernels.single_qubit(psi, q, u)


def run_qaoa(inst: Instance, cfg: PenaltyConfig | None = None, p: int = 1,
             starts: int = 2, budget: int = 30, seed: int = 0,
             top_k: int = 256) -> RunResult:
    """Conventional penalty-QAOA on the QUBO layout, dense simulation.

    p = 0 evaluates the bare Hadamard-uniform state.  The reported
    distribution keeps the top_k most probable bitstrings (the full vector
    has 2^n_q entries); metrics are computed from the full state.
    """
    t0 = time.time()
    layout = QuboLayout.for_instance(inst)
    if layout.n_qubits > QUBO_MAX_QUBITS:
        raise ResourceLimitError(
            f"QUBO layout needs {layout.n_qubits} qubits "
            f"(> {QUBO_MAX_QUBITS}); reduce the instance")
    cfg = cfg or PenaltyConfig.default_for(inst)
    cost, route, feas = build_tables(inst, layout, cfg)
    oracle_cost = exact_solve(inst).min_cost
    optimal = feas & (route <= oracle_cost + COST_CLASS_TOL)
    size = 1 << layout.n_qubits
    uniform = np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128)

    def evolve(v: np.ndarray) -> np.ndarray:
        psi = uniform.copy()
        for j in range(p):
            _apply_layer(psi, layout.n_qubits, cost, v[j], v[p + j])
        return psi

    if p == 0:
        params = np.array([])
        trace: tuple[float, ...] = ()
        psi = uniform.copy()
    else:
        def objective(v: np.ndarray) -> float:
            return float((np.abs(evolve(v)) ** 2) @ cost)

        opt = optimize(objective, p, starts=starts, budget=budget, seed=seed)
        params, trace = opt.params, opt.trace
        psi = evolve(params)

    probs = np.abs(psi) ** 2
    expectation = float(probs @ cost)
    m = Metrics(alpha=expectation / oracle_cost - 1.0,
                r_opt=float(probs[optimal].sum()),
                r_feas=float(probs[feas].sum()))
    top = np.argsort(probs)[::-1][:top_k]
    width = layout.n_qubits
    dist = {format(int(i), f"0{width}b"): float(probs[i]) for i in top}
    return RunResult(instance=inst.name, method="qubo-qaoa", p=p,
                     gammas=tuple(params[:p]), betas=tuple(params[p:]),
                     expectation=expectation, metrics=m, oracle_cost=oracle_cost,
                     distribution=dist, trace=trace, seed=seed,
                     wall_time=time.time() - t0,
                     extra={"n_qubits": layout.n_qubits,
                            "n_vehicles": layout.n_vehicles,
                            "distribution_top_k": top_k})
