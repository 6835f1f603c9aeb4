"""Classical CVRP problem model: instances, solutions, validation, exact oracle.

Vertex 0 is always the depot; customers are numbered 1..N.  Distances are
either Euclidean (computed from coordinates) or an explicit, possibly
asymmetric, (N+1)x(N+1) matrix.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError

EXACT_SOLVE_MAX_N = 8


@dataclass(frozen=True)
class Customer:
    x: float
    y: float
    demand: int


@dataclass(frozen=True)
class Instance:
    """A CVRP instance with frozen data and a precomputed distance matrix."""

    name: str
    capacity: int
    depot: tuple[float, float]
    customers: tuple[Customer, ...]
    w: np.ndarray
    euclidean: bool = True

    def __post_init__(self):
        if not isinstance(self.capacity, int) or self.capacity <= 0:
            raise ValidationError(f"capacity must be a positive integer, got {self.capacity!r}")
        if len(self.customers) < 1:
            raise ValidationError("instance needs at least one customer")
        for k, c in enumerate(self.customers, start=1):
            if not isinstance(c.demand, int) or c.demand < 1:
                raise ValidationError(f"customer {k}: demand must be a positive integer")
            if c.demand > self.capacity:
                raise ValidationError(
                    f"customer {k}: demand {c.demand} exceeds capacity {self.capacity}")
        n = len(self.customers) + 1
        if self.w.shape != (n, n):
            raise ValidationError(f"distance matrix must be {n}x{n}, got {self.w.shape}")
        if not np.all(np.isfinite(self.w)):
            raise ValidationError("distance matrix contains non-finite entries")
        if np.any(self.w < 0):
            raise ValidationError("distance matrix contains negative entries")
        if np.any(np.abs(np.diag(self.w)) > 0):
            raise ValidationError("distance matrix diagonal must be zero")
        self.w.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.customers)

    @property
    def demands(self) -> tuple[int, ...]:
        return tuple(c.demand for c in self.customers)

    @property
    def max_demand(self) -> int:
        return max(self.demands)

    @classmethod
    def from_euclidean(cls, name: str, capacity: int, depot: Sequence[float],
                       customers: Iterable[tuple[float, float, int]]) -> "Instance":
        cust = tuple(Customer(float(x), float(y), int(q)) for x, y, q in customers)
        pts = [tuple(map(float, depot))] + [(c.x, c.y) for c in cust]
        n = len(pts)
        w = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                w[i, j] = math.dist(pts[i], pts[j])
        return cls(name=name, capacity=int(capacity), depot=tuple(map(float, depot)),
                   customers=cust, w=w, euclidean=True)

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "capacity": self.capacity,
            "depot": list(self.depot),
            "customers": [{"x": c.x, "y": c.y, "demand": c.demand} for c in self.customers],
            "distance": "euclidean" if self.euclidean else {"matrix": self.w.tolist()},
        }
        return json.dumps(doc, indent=2)


def load_instance(data: bytes | str) -> Instance:
    """Parse and validate an instance document (see the JSON schema in the README)."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed instance document: {e}") from e
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    try:
        name = str(doc["name"])
        capacity = doc["capacity"]
        depot = tuple(float(v) for v in doc["depot"])
        raw_customers = doc["customers"]
    except KeyError as e:
        raise ValidationError(f"instance document missing key {e}") from e
    if len(depot) != 2:
        raise ValidationError("depot must be a 2-element [x, y] pair")
    if not isinstance(raw_customers, list) or not raw_customers:
        raise ValidationError("customers must be a non-empty list")

    ids = []
    customers = []
    for k, c in enumerate(raw_customers, start=1):
        try:
            customers.append(Customer(float(c["x"]), float(c["y"]), int(c["demand"])))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"customer {k} is malformed: {e}") from e
        ids.append(c.get("id", k))
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate customer ids")

    distance = doc.get("distance", "euclidean")
    if distance == "euclidean":
        return Instance.from_euclidean(name, int(capacity), depot,
                                       [(c.x, c.y, c.demand) for c in customers])
    if isinstance(distance, dict) and "matrix" in distance:
        w = np.array(distance["matrix"], dtype=float)
        return Instance(name=name, capacity=int(capacity), depot=depot,
                        customers=tuple(customers), w=w, euclidean=False)
    raise ValidationError("distance must be \"euclidean\" or {\"matrix\": [[...]]}")


def load_instance_file(path: str) -> Instance:
    with open(path, "rb") as f:
        return load_instance(f.read())


def bundled_instance(name: str) -> Instance:
    """Load one of the bundled fixtures (``p1`` or ``p2``)."""
    ref = resources.files("cvrp_aoa.data").joinpath(f"{name}.json")
    try:
        return load_instance(ref.read_bytes())
    except FileNotFoundError:
        raise ValidationError(f"no bundled instance named {name!r}")


@dataclass(frozen=True)
class Solution:
    """A route set as an ordered list of directed edges over vertices 0..N."""

    edges: tuple[tuple[int, int], ...]
    routes: tuple[tuple[int, ...], ...] = field(default=())

    @classmethod
    def from_edges(cls, edges: Sequence[tuple[int, int]]) -> "Solution":
        routes = []
        cur: list[int] | None = None
        for a, b in edges:
            if a == 0:
                if cur is not None:
                    raise ValidationError("route started before previous route closed")
                cur = [0, b]
            elif cur is None or a != cur[-1]:
                raise ValidationError(f"edge ({a},{b}) does not continue the open route")
            elif b == 0:
                cur.append(0)
                routes.append(tuple(cur))
                cur = None
            else:
                cur.append(b)
        if cur is not None:
            raise ValidationError("last route does not return to the depot")
        return cls(edges=tuple((int(a), int(b)) for a, b in edges), routes=tuple(routes))

    @classmethod
    def from_routes(cls, routes: Sequence[Sequence[int]]) -> "Solution":
        edges = []
        for r in routes:
            if len(r) < 3 or r[0] != 0 or r[-1] != 0:
                raise ValidationError(f"route {list(r)} must be depot-to-depot")
            edges.extend(zip(r[:-1], r[1:]))
        return cls.from_edges(edges)

    @property
    def n_routes(self) -> int:
        return len(self.routes)


def solution_cost(sol: Solution, w: np.ndarray) -> float:
    """Total travel distance, the sum of w[i, j] over the solution's edges."""
    total = 0.0
    m = w.shape[0]
    for i, j in sol.edges:
        if not (0 <= i < m and 0 <= j < m):
            raise ValidationError(f"edge ({i},{j}) out of range for a {m}-vertex instance")
        total += float(w[i, j])
    return total


@dataclass(frozen=True)
class ValidityReport:
    depot_ok: bool
    visit_ok: bool
    capacity_ok: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.depot_ok and self.visit_ok and self.capacity_ok


def validate_solution(sol: Solution, inst: Instance) -> ValidityReport:
    """Check the depot, customer-visit and capacity constraints.

    Violations are reported as data, never raised.
    """
    violations = []
    depot_ok = True
    for r in sol.routes:
        if r[0] != 0 or r[-1] != 0 or len(r) < 3 or 0 in r[1:-1]:
            depot_ok = False
            violations.append(f"route {list(r)} is not a depot-to-depot customer sequence")

    seen: dict[int, int] = {}
    for r in sol.routes:
        for v in r[1:-1]:
            seen[v] = seen.get(v, 0) + 1
    visit_ok = True
    for i in range(1, inst.n + 1):
        cnt = seen.get(i, 0)
        if cnt != 1:
            visit_ok = False
            violations.append(f"customer {i} visited {cnt} times")
    for v in seen:
        if not (1 <= v <= inst.n):
            visit_ok = False
            violations.append(f"unknown customer {v}")

    capacity_ok = True
    demands = inst.demands
    for r in sol.routes:
        load = sum(demands[v - 1] for v in r[1:-1] if 1 <= v <= inst.n)
        if load > inst.capacity:
            capacity_ok = False
            violations.append(f"route {list(r)} load {load} exceeds capacity {inst.capacity}")

    return ValidityReport(depot_ok, visit_ok, capacity_ok, tuple(violations))


@dataclass(frozen=True)
class ExactResult:
    min_cost: float
    optima: tuple[Solution, ...]


def exact_solve(inst: Instance, tol: float = 1e-9) -> ExactResult:
    """Brute-force oracle over the full encoding search space.

    Enumerates every (permutation, depot-return-bits) encoding, decodes each
    one, and returns the minimum cost together with all distinct optimal
    route sets.  Enumerating the encoding space itself guarantees the oracle
    and the ansatz search the same space.
    """
    from .encoding import Encoding, decode

    if inst.n > EXACT_SOLVE_MAX_N:
        raise ResourceLimitError(
            f"exact_solve enumerates {inst.n}! permutations; N <= {EXACT_SOLVE_MAX_N} required")
    demands, capacity = inst.demands, inst.capacity
    best = math.inf
    best_sets: dict[frozenset, Solution] = {}
    for order in itertools.permutations(range(1, inst.n + 1)):
        for yb in range(2 ** max(inst.n - 1, 0)):
            y = tuple((yb >> k) & 1 for k in range(inst.n - 1))
            sol = decode(Encoding(order, y), demands, capacity)
            c = solution_cost(sol, inst.w)
            if c < best - tol:
                best = c
                best_sets = {frozenset(sol.routes): sol}
            elif abs(c - best) <= tol:
                best_sets.setdefault(frozenset(sol.routes), sol)
    return ExactResult(min_cost=best, optima=tuple(best_sets.values()))


def generate_instances(n_customers: int, count: int, capacity: int,
                       demand_range: tuple[int, int], seed: int) -> list[Instance]:
    """Random instances: coordinates uniform in the unit square, integer demands.

    Deterministic under ``seed`` (counter-based Philox stream), with the seed
    and index recorded in each instance name.
    """
    lo, hi = demand_range
    if not (1 <= lo <= hi <= capacity):
        raise ValidationError(f"need 1 <= lo <= hi <= capacity, got [{lo},{hi}] Q={capacity}")
    if count < 0:
        raise ValidationError("count must be non-negative")
    out = []
    for k in range(count):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, k], dtype=np.uint64)))
        depot = tuple(rng.uniform(0.0, 1.0, 2))
        custs = []
        for _ in range(n_customers):
            x, y = rng.uniform(0.0, 1.0, 2)
            q = int(rng.integers(lo, hi + 1))
            custs.append((x, y, q))
        out.append(Instance.from_euclidean(f"rand-n{n_customers}-s{seed}-{k:02d}",
                                           capacity, depot, custs))
    return out
