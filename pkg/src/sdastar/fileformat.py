"""JSON problem and schedule files.

Problem file::

    {"products": [{"id", "run_mean", "run_std", "setup_mean", "setup_std"}, ...],
     "orders": [{"id", "product", "quantity", "deadline", "weight"}, ...],
     "initial_setup": "X", "initial_inventory": {"X": 0},
     "allow_initial_setup": true, "grid_step": 0.25}

Schedule file::

    {"operators": [{"op": "make", "product": "X", "quantity": 11},
                   {"op": "ship", "order": "R1"},
                   {"op": "setup", "product": "Y"}, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .dist import DEFAULT_STEP
from .errors import ProblemError
from .model import Make, Order, Problem, Product, Setup, Ship

_PRODUCT_FIELDS = ("id", "run_mean", "run_std", "setup_mean", "setup_std")
_ORDER_FIELDS = ("id", "product", "quantity", "deadline")


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ProblemError(f"missing field {where}.{key}", f"{where}.{key}")
    return obj[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemError(f"field {where} must be a number, got {value!r}", where)
    return float(value)


def problem_from_dict(data: dict) -> Problem:
    if not isinstance(data, dict):
        raise ProblemError("problem document must be an object", "<root>")
    raw_products = _require(data, "products", "problem")
    raw_orders = _require(data, "orders", "problem")
    if not isinstance(raw_products, list) or not raw_products:
        raise ProblemError("field problem.products must be a non-empty list", "products")
    if not isinstance(raw_orders, list):
        raise ProblemError("field problem.orders must be a list", "orders")
    products = []
    for k, rp in enumerate(raw_products):
        where = f"products[{k}]"
        for f in _PRODUCT_FIELDS:
            _require(rp, f, where)
        try:
            products.append(Product(
                str(rp["id"]),
                _number(rp["run_mean"], f"{where}.run_mean"),
                _number(rp["run_std"], f"{where}.run_std"),
                _number(rp["setup_mean"], f"{where}.setup_mean"),
                _number(rp["setup_std"], f"{where}.setup_std"),
            ))
        except ProblemError as e:
            if e.field and e.field.startswith(where):
                raise
            raise ProblemError(str(e), f"{where}.{e.field}") from None
    orders = []
    for k, ro in enumerate(raw_orders):
        where = f"orders[{k}]"
        for f in _ORDER_FIELDS:
            _require(ro, f, where)
        qty = ro["quantity"]
        if isinstance(qty, bool) or not isinstance(qty, int):
            raise ProblemError(f"field {where}.quantity must be an integer", f"{where}.quantity")
        try:
            orders.append(Order(
                str(ro["id"]), str(ro["product"]), qty,
                _number(ro["deadline"], f"{where}.deadline"),
                _number(ro.get("weight", 1.0), f"{where}.weight"),
            ))
        except ProblemError as e:
            if e.field and e.field.startswith(where):
                raise
            raise ProblemError(f"{where}: {e}", f"{where}.{e.field}") from None
    inventory = data.get("initial_inventory", {}) or {}
    if not isinstance(inventory, dict):
        raise ProblemError("field problem.initial_inventory must be an object", "initial_inventory")
    allow = data.get("allow_initial_setup", True)
    if not isinstance(allow, bool):
        raise ProblemError("field problem.allow_initial_setup must be a boolean", "allow_initial_setup")
    return Problem(
        tuple(products), tuple(orders),
        initial_setup=str(_require(data, "initial_setup", "problem")),
        initial_inventory={str(k): v for k, v in inventory.items()},
        allow_initial_setup=allow,
        grid_step=_number(data.get("grid_step", DEFAULT_STEP), "grid_step"),
    )


def problem_to_dict(problem: Problem) -> dict:
    return {
        "products": [
            {"id": p.id, "run_mean": p.unit_run_mean, "run_std": p.unit_run_std,
             "setup_mean": p.setup_mean, "setup_std": p.setup_std}
            for p in problem.products
        ],
        "orders": [
            {"id": o.id, "product": o.product, "quantity": o.quantity,
             "deadline": o.deadline, "weight": o.weight}
            for o in problem.orders
        ],
        "initial_setup": problem.initial_setup,
        "initial_inventory": dict(problem.initial_inventory),
        "allow_initial_setup": problem.allow_initial_setup,
        "grid_step": problem.grid_step,
    }


def load_problem(path) -> Problem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ProblemError(f"{path}: not valid JSON ({e})", "<root>") from None
    return problem_from_dict(data)


def save_problem(problem: Problem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")


def operator_to_dict(op) -> dict:
    if isinstance(op, Make):
        return {"op": "make", "product": op.product, "quantity": op.quantity}
    if isinstance(op, Setup):
        return {"op": "setup", "product": op.product}
    if isinstance(op, Ship):
        return {"op": "ship", "order": op.order}
    raise TypeError(f"not an operator: {op!r}")


def operator_from_dict(rec: dict):
    where = "schedule.operators[]"
    kind = _require(rec, "op", where)
    if kind == "make":
        qty = _require(rec, "quantity", where)
        if isinstance(qty, bool) or not isinstance(qty, int) or qty < 1:
            raise ProblemError("make quantity must be a positive integer", f"{where}.quantity")
        return Make(str(_require(rec, "product", where)), qty)
    if kind == "setup":
        return Setup(str(_require(rec, "product", where)))
    if kind == "ship":
        return Ship(str(_require(rec, "order", where)))
    raise ProblemError(f"unknown operator kind {kind!r}", f"{where}.op")


def schedule_from_dict(data: dict) -> list:
    ops = _require(data, "operators", "schedule")
    if not isinstance(ops, list):
        raise ProblemError("field schedule.operators must be a list", "schedule.operators")
    return [operator_from_dict(r) for r in ops]


def load_schedule(path) -> list:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ProblemError(f"{path}: not valid JSON ({e})", "<root>") from None
    return schedule_from_dict(data)


def save_schedule(operators, path) -> None:
    doc = {"operators": [operator_to_dict(op) for op in operators]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
