"""Stochastic lot-sizing instances, factory states, operators and path costs.

A state holds per-product inventory, the machine setup, which orders have
shipped, and whether the last operator was a setup. Operators are generated
under restrictions that keep the branching factor near ``m + 1``:

* ``Ship(j)`` only when inventory of the order's product equals ``q_j``;
* a single ``Make(i, q*)`` for the current setup, ``q*`` being the smallest
  top-up that makes some unshipped order shippable;
* ``Setup(i)`` only with empty inventory, never twice in a row, and only to
  products that still have unshipped orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Mapping, Sequence, Union

from . import dist
from .dist import DiscreteDistribution
from .errors import ContractViolation, ProblemError, ScheduleInvalidError


@dataclass(frozen=True)
class Product:
    id: str
    unit_run_mean: float
    unit_run_std: float
    setup_mean: float
    setup_std: float

    def __post_init__(self):
        if not self.unit_run_mean > 0:
            raise ProblemError(f"product {self.id}: unit_run_mean must be > 0", "run_mean")
        if self.unit_run_std < 0:
            raise ProblemError(f"product {self.id}: unit_run_std must be >= 0", "run_std")
        if self.setup_mean < 0:
            raise ProblemError(f"product {self.id}: setup_mean must be >= 0", "setup_mean")
        if self.setup_std < 0:
            raise ProblemError(f"product {self.id}: setup_std must be >= 0", "setup_std")


@dataclass(frozen=True)
class Order:
    id: str
    product: str
    quantity: int
    deadline: float
    weight: float = 1.0

    def __post_init__(self):
        if int(self.quantity) != self.quantity or self.quantity < 1:
            raise ProblemError(f"order {self.id}: quantity must be a positive integer", "quantity")
        if self.deadline < 0:
            raise ProblemError(f"order {self.id}: deadline must be >= 0", "deadline")
        if self.weight < 0:
            raise ProblemError(f"order {self.id}: weight must be >= 0", "weight")


@dataclass(frozen=True)
class Problem:
    products: tuple[Product, ...]
    orders: tuple[Order, ...]
    initial_setup: str
    initial_inventory: Mapping[str, int] = field(default_factory=dict)
    allow_initial_setup: bool = True
    grid_step: float = dist.DEFAULT_STEP

    def __post_init__(self):
        object.__setattr__(self, "products", tuple(self.products))
        object.__setattr__(self, "orders", tuple(self.orders))
        object.__setattr__(self, "initial_inventory", dict(self.initial_inventory))
        ids = [p.id for p in self.products]
        if len(set(ids)) != len(ids):
            raise ProblemError("duplicate product id", "products")
        oids = [o.id for o in self.orders]
        if len(set(oids)) != len(oids):
            raise ProblemError("duplicate order id", "orders")
        for o in self.orders:
            if o.product not in ids:
                raise ProblemError(f"order {o.id} references unknown product {o.product!r}", "orders.product")
        if self.initial_setup not in ids:
            raise ProblemError(f"unknown initial_setup {self.initial_setup!r}", "initial_setup")
        for pid, qty in self.initial_inventory.items():
            if pid not in ids:
                raise ProblemError(f"initial_inventory references unknown product {pid!r}", "initial_inventory")
            if int(qty) != qty or qty < 0:
                raise ProblemError(f"initial_inventory[{pid}] must be a nonnegative integer", "initial_inventory")
        if not self.grid_step > 0:
            raise ProblemError("grid_step must be positive", "grid_step")

    @cached_property
    def product_index(self) -> dict[str, int]:
        return {p.id: k for k, p in enumerate(self.products)}

    @cached_property
    def order_index(self) -> dict[str, int]:
        return {o.id: k for k, o in enumerate(self.orders)}

    def product(self, pid: str) -> Product:
        try:
            return self.products[self.product_index[pid]]
        except KeyError:
            raise KeyError(f"unknown product {pid!r}") from None

    def order(self, oid: str) -> Order:
        return self.orders[self.order_index[oid]]

    @cached_property
    def total_weight(self) -> float:
        return float(sum(o.weight for o in self.orders))

    def with_weights(self, weights: Mapping[str, float]) -> "Problem":
        orders = tuple(replace(o, weight=weights.get(o.id, o.weight)) for o in self.orders)
        return replace(self, orders=orders)


@dataclass(frozen=True)
class State:
    inventory: tuple[int, ...]
    setup: str
    shipped: tuple[bool, ...]
    just_set_up: bool = False

    @property
    def key(self):
        # dominance grouping identity; the dataclass itself is hashable
        return self


@dataclass(frozen=True)
class Make:
    product: str
    quantity: int

    def __str__(self):
        return f"Make-{self.quantity}-of-{self.product}"


@dataclass(frozen=True)
class Setup:
    product: str

    def __str__(self):
        return f"Setup-{self.product}"


@dataclass(frozen=True)
class Ship:
    order: str

    def __str__(self):
        return f"Ship-{self.order}"


Operator = Union[Make, Setup, Ship]


@dataclass(frozen=True, eq=False)
class PathCost:
    """Expected accrued penalty E[W(A)] and completion-time law T(A)."""

    expected_penalty: float
    time: DiscreteDistribution


@dataclass(frozen=True, eq=False)
class OrderOutcome:
    ship_time: DiscreteDistribution
    late_prob: float
    penalty: float


@dataclass(frozen=True, eq=False)
class Schedule:
    operators: tuple
    cost: PathCost
    per_order: dict

    @property
    def expected_penalty(self) -> float:
        return self.cost.expected_penalty

    def describe(self) -> str:
        return " -> ".join(str(op) for op in self.operators) or "(empty)"


def initial_state(problem: Problem) -> State:
    inv = tuple(int(problem.initial_inventory.get(p.id, 0)) for p in problem.products)
    return State(
        inventory=inv,
        setup=problem.initial_setup,
        shipped=(False,) * len(problem.orders),
        just_set_up=False,
    )


def initial_cost(problem: Problem) -> PathCost:
    return PathCost(0.0, dist.point_mass(0.0, problem.grid_step))


def is_goal(state: State) -> bool:
    return all(state.shipped)


def applicable_operators(state: State, problem: Problem) -> list:
    """Operators allowed in ``state``, in canonical order: ships, make, setups."""
    pidx = problem.product_index
    ships = []
    for k, o in enumerate(problem.orders):
        if not state.shipped[k] and state.inventory[pidx[o.product]] == o.quantity:
            ships.append((o.deadline, k, Ship(o.id)))
    ships.sort(key=lambda t: (t[0], t[1]))
    ops = [t[2] for t in ships]

    cur = state.setup
    have = state.inventory[pidx[cur]]
    gaps = [o.quantity - have for k, o in enumerate(problem.orders)
            if not state.shipped[k] and o.product == cur and o.quantity > have]
    if gaps:
        ops.append(Make(cur, min(gaps)))

    if sum(state.inventory) == 0 and not state.just_set_up:
        if problem.allow_initial_setup or state != initial_state(problem):
            demanded = {o.product for k, o in enumerate(problem.orders) if not state.shipped[k]}
            ops.extend(Setup(p.id) for p in problem.products if p.id != cur and p.id in demanded)
    return ops


def _apply(state: State, op, problem: Problem) -> State:
    if isinstance(op, Make):
        inv = list(state.inventory)
        inv[problem.product_index[op.product]] += op.quantity
        return State(tuple(inv), state.setup, state.shipped, False)
    if isinstance(op, Setup):
        return State(state.inventory, op.product, state.shipped, True)
    if isinstance(op, Ship):
        k = problem.order_index[op.order]
        o = problem.orders[k]
        inv = list(state.inventory)
        inv[problem.product_index[o.product]] -= o.quantity
        shipped = list(state.shipped)
        shipped[k] = True
        return State(tuple(inv), state.setup, tuple(shipped), False)
    raise TypeError(f"not an operator: {op!r}")


def apply(state: State, op, problem: Problem) -> State:
    """Successor of ``state`` under ``op``; ``op`` must be applicable."""
    if op not in applicable_operators(state, problem):
        raise ContractViolation(f"{op} is not applicable in {state}")
    return _apply(state, op, problem)


@lru_cache(maxsize=None)
def _unit_law(run_mean: float, run_std: float, step: float) -> DiscreteDistribution:
    return dist.truncated_normal(run_mean, run_std, step)


@lru_cache(maxsize=None)
def _make_law(run_mean: float, run_std: float, step: float, q: int) -> DiscreteDistribution:
    if q == 1:
        return _unit_law(run_mean, run_std, step)
    half = _make_law(run_mean, run_std, step, q // 2)
    law = dist.convolve(half, half)
    if q & 1:
        law = dist.convolve(law, _unit_law(run_mean, run_std, step))
    return law


@lru_cache(maxsize=None)
def _setup_law(setup_mean: float, setup_std: float, step: float) -> DiscreteDistribution:
    if setup_std == 0:
        return dist.point_mass(setup_mean, step)
    return dist.truncated_normal(setup_mean, setup_std, step)


def make_time(problem: Problem, product: str, q: int) -> DiscreteDistribution:
    """Law of the time to make ``q`` units: q iid unit run times summed."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    p = problem.product(product)
    return _make_law(p.unit_run_mean, p.unit_run_std, problem.grid_step, int(q))


def setup_time(problem: Problem, product: str) -> DiscreteDistribution:
    p = problem.product(product)
    return _setup_law(p.setup_mean, p.setup_std, problem.grid_step)


@lru_cache(maxsize=None)
def _increment_law(run_mean, run_std, setup_mean, setup_std, step, q, with_setup):
    law = _make_law(run_mean, run_std, step, q)
    if with_setup:
        law = dist.convolve(_setup_law(setup_mean, setup_std, step), law)
    return law


def increment_time(problem: Problem, product: str, q: int, with_setup: bool) -> DiscreteDistribution:
    """Law of (optional setup) + making ``q`` units of ``product``. Cached."""
    p = problem.product(product)
    return _increment_law(p.unit_run_mean, p.unit_run_std, p.setup_mean, p.setup_std,
                          problem.grid_step, int(q), bool(with_setup))


def transition_cost(cost: PathCost, op, problem: Problem) -> PathCost:
    if isinstance(op, Make):
        return PathCost(cost.expected_penalty,
                        dist.convolve(cost.time, make_time(problem, op.product, op.quantity)))
    if isinstance(op, Setup):
        return PathCost(cost.expected_penalty,
                        dist.convolve(cost.time, setup_time(problem, op.product)))
    if isinstance(op, Ship):
        o = problem.order(op.order)
        late = dist.prob_greater(cost.time, o.deadline)
        return PathCost(cost.expected_penalty + o.weight * late, cost.time)
    raise TypeError(f"not an operator: {op!r}")


def replay(problem: Problem, operators: Sequence) -> Schedule:
    """Re-run ``operators`` from the initial state, checking legality.

    Raises ScheduleInvalidError on an inapplicable step or if the final
    state leaves orders unshipped.
    """
    state = initial_state(problem)
    cost = initial_cost(problem)
    per_order = {}
    for step_no, op in enumerate(operators):
        if op not in applicable_operators(state, problem):
            raise ScheduleInvalidError(f"step {step_no}: {op} is not applicable")
        new_cost = transition_cost(cost, op, problem)
        if isinstance(op, Ship):
            o = problem.order(op.order)
            late = dist.prob_greater(cost.time, o.deadline)
            per_order[op.order] = OrderOutcome(cost.time, late, o.weight * late)
        state = _apply(state, op, problem)
        cost = new_cost
    if not is_goal(state):
        missing = [o.id for k, o in enumerate(problem.orders) if not state.shipped[k]]
        raise ScheduleInvalidError(f"schedule leaves orders unshipped: {missing}")
    return Schedule(tuple(operators), cost, per_order)


def estimated_load(problem: Problem) -> float:
    """Mean processing time of all orders plus one setup per distinct product."""
    run = sum(o.quantity * problem.product(o.product).unit_run_mean for o in problem.orders)
    setups = sum(problem.product(pid).setup_mean for pid in {o.product for o in problem.orders})
    return run + setups


def worst_case_makespan(problem: Problem) -> float:
    """Upper bound on any schedule's completion time (all laws at +4 std)."""
    total = 0.0
    for o in problem.orders:
        p = problem.product(o.product)
        total += o.quantity * (p.unit_run_mean + dist.TRUNCATION_SIGMAS * p.unit_run_std)
        total += p.setup_mean + dist.TRUNCATION_SIGMAS * p.setup_std
    return math.ceil(total)
