"""Built-in instances and a seeded random-instance generator.

Random instances draw orders over the six Nova products and rescale order
quantities until the estimated load (mean run time of every unit plus one
setup per distinct product ordered) divided by the horizon hits a target
capacity ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GenerationError, InvalidParameterError
from .model import Order, Problem, Product, estimated_load

NOVA_STEP = 0.05
WEIGHT_RULES = ("unit", "per-unit-quantity")


def nova_products() -> list[Product]:
    rows = [
        ("1", 2.9, 0.2, 5.0, 0.1),
        ("2", 3.1, 0.2, 5.0, 0.1),
        ("3", 3.1, 0.2, 12.0, 0.1),
        ("4", 3.4, 0.3, 15.0, 0.2),
        ("5", 3.7, 0.3, 15.0, 0.2),
        ("6", 4.0, 0.4, 15.0, 0.2),
    ]
    return [Product(*r) for r in rows]


def xyz_products(run_std: float = 2.0) -> list[Product]:
    """Products X, Y, Z with deterministic setups and per-unit run noise."""
    return [
        Product("X", 20.0, run_std, 5.0, 0.0),
        Product("Y", 30.0, run_std, 10.0, 0.0),
        Product("Z", 25.0, run_std, 5.0, 0.0),
    ]


def two_order_problem(w1: float = 1.0, w2: float = 1.0, *, with_r3: bool = False, w3: float = 1.0,
                      run_std: float = 2.0, grid_step: float = 0.05) -> Problem:
    """Orders R1 (11 X) and R2 (8 Y) due at 480, optionally R3 (19 Z) due at 960.

    The default step is finer than the package default because a deadline
    sitting on a grid point biases lateness down by half a cell of density.
    """
    orders = [Order("R1", "X", 11, 480.0, w1), Order("R2", "Y", 8, 480.0, w2)]
    if with_r3:
        orders.append(Order("R3", "Z", 19, 960.0, w3))
    return Problem(tuple(xyz_products(run_std)), tuple(orders), "X", grid_step=grid_step)


def sample_orders_problem(grid_step: float = 0.25) -> Problem:
    """Four orders R4..R7 on products X and Y, all due at 480, unit weights."""
    products = tuple(xyz_products()[:2])
    orders = (
        Order("R4", "X", 6, 480.0),
        Order("R5", "X", 4, 480.0),
        Order("R6", "Y", 2, 480.0),
        Order("R7", "Y", 6, 480.0),
    )
    return Problem(products, orders, "X", grid_step=grid_step)


@dataclass(frozen=True)
class GenSpec:
    n_orders: int = 8
    target_capacity: float = 1.1
    horizon: float = 480.0
    quantity_range: tuple[int, int] = (5, 30)
    weight_rule: str = "per-unit-quantity"
    seed: int = 0
    grid_step: float = NOVA_STEP
    tolerance: float = 0.02
    max_attempts: int = 100

    def __post_init__(self):
        if self.n_orders < 1:
            raise InvalidParameterError("n_orders must be >= 1")
        if not self.target_capacity > 0:
            raise InvalidParameterError("target_capacity must be > 0")
        if not self.horizon > 0:
            raise InvalidParameterError("horizon must be > 0")
        lo, hi = self.quantity_range
        if not 1 <= lo <= hi:
            raise InvalidParameterError("quantity_range must satisfy 1 <= lo <= hi")
        if self.weight_rule not in WEIGHT_RULES:
            raise InvalidParameterError(f"weight_rule must be one of {WEIGHT_RULES}")


def capacity_ratio(problem: Problem, horizon: float) -> float:
    return estimated_load(problem) / horizon


def _calibrate(qty: np.ndarray, run_means: np.ndarray, setups: float, target_load: float):
    """Rescale then nudge integer quantities toward ``target_load``."""
    run_target = target_load - setups
    if run_target <= run_means.min():
        return None
    q = np.maximum(1, np.rint(qty * run_target / float(qty @ run_means))).astype(int)
    err = float(q @ run_means) - run_target
    # greedy unit moves; each step strictly shrinks |err|
    while True:
        best = None
        for k in range(len(q)):
            for delta in (-1, 1):
                if q[k] + delta < 1:
                    continue
                new_err = err + delta * run_means[k]
                if abs(new_err) < abs(err) - 1e-12 and (best is None or abs(new_err) < abs(best[2])):
                    best = (k, delta, new_err)
        if best is None:
            return q
        q[best[0]] += best[1]
        err = best[2]


def generate(spec: GenSpec, products: Optional[list[Product]] = None) -> Problem:
    """Random instance for ``spec``; identical output for identical specs."""
    products = list(products) if products is not None else nova_products()
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.quantity_range
    H = spec.horizon
    for _ in range(spec.max_attempts):
        prod_idx = rng.integers(0, len(products), size=spec.n_orders)
        qty = rng.integers(lo, hi + 1, size=spec.n_orders)
        raw_deadlines = rng.uniform(0.5 * H, H, size=spec.n_orders)
        start_pick = rng.random()

        run_means = np.array([products[i].unit_run_mean for i in prod_idx])
        distinct = sorted(set(int(i) for i in prod_idx))
        setups = sum(products[i].setup_mean for i in distinct)
        q = _calibrate(qty, run_means, setups, spec.target_capacity * H)
        if q is None:
            continue
        load = float(q @ run_means) + setups
        if abs(load / H - spec.target_capacity) > spec.tolerance:
            continue

        initial = products[distinct[int(start_pick * len(distinct))]].id
        orders = []
        for k in range(spec.n_orders):
            p = products[prod_idx[k]]
            solo = int(q[k]) * p.unit_run_mean + (0.0 if p.id == initial else p.setup_mean)
            deadline = max(float(round(raw_deadlines[k])), float(math.ceil(solo)))
            weight = 1.0 if spec.weight_rule == "unit" else float(q[k])
            orders.append(Order(f"O{k + 1}", p.id, int(q[k]), deadline, weight))
        return Problem(tuple(products), tuple(orders), initial,
                       allow_initial_setup=False, grid_step=spec.grid_step)
    raise GenerationError(
        f"could not hit capacity {spec.target_capacity} within {spec.max_attempts} attempts")
