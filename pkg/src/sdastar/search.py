"""Best-first search with stochastic-dominance pruning over path costs.

Each open node carries a path cost ``<E[W], T>``. Nodes are popped in order
of ``E[W] + h``; the first goal popped is optimal for an admissible ``h``.
For every state the search keeps the set of mutually nondominated costs
alive; a new path is discarded if some survivor has no larger expected
penalty and a stochastically earlier (or equal) time law, and survivors the
newcomer beats are retired. Retired nodes stay in the heap and are skipped
when popped.
"""

from __future__ import annotations

import heapq
import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import dist
from .errors import SearchInvariantError, SearchLimitError
from .heuristics import get_heuristic
from .model import (
    OrderOutcome,
    PathCost,
    Problem,
    Schedule,
    Ship,
    State,
    _apply,
    applicable_operators,
    initial_cost,
    initial_state,
    is_goal,
    replay,
    transition_cost,
)

PENALTY_TOL = 1e-12
MONOTONE_TOL = 1e-9


def dominated_by(a: PathCost, b: PathCost) -> bool:
    """True if path cost ``a`` may be pruned in favour of ``b``."""
    return (b.expected_penalty <= a.expected_penalty + PENALTY_TOL
            and dist.dominates(b.time, a.time))


@dataclass(eq=False)
class Node:
    state: State
    cost: PathCost
    h: float
    parent: Optional["Node"] = None
    via: object = None
    seq: int = 0
    alive: bool = True

    @property
    def priority(self) -> float:
        return self.cost.expected_penalty + self.h

    def path(self) -> list:
        ops = []
        node = self
        while node.parent is not None:
            ops.append(node.via)
            node = node.parent
        ops.reverse()
        return ops


class Frontier:
    """Per-state sets of live, mutually nondominated nodes."""

    def __init__(self):
        self._members = defaultdict(list)

    def offer(self, node: Node) -> tuple[bool, list]:
        """Try to add ``node``.

        Returns ``(accepted, retired)``. A node is refused when an existing
        member weakly dominates it (so of two equal costs the earlier one
        stays); otherwise members it dominates are retired and returned.
        """
        members = self._members[node.state]
        for m in members:
            if dominated_by(node.cost, m.cost):
                return False, []
        retired = [m for m in members if dominated_by(m.cost, node.cost)]
        if retired:
            for m in retired:
                m.alive = False
            members[:] = [m for m in members if m.alive]
        members.append(node)
        return True, retired

    def members(self, state: State) -> list:
        return list(self._members.get(state, ()))

    def states(self):
        return self._members.keys()

    def __len__(self):
        return sum(len(v) for v in self._members.values())


@dataclass
class SearchStats:
    expansions: int = 0
    dominations: int = 0
    generated: int = 0
    peak_open: int = 0
    wall_time: float = 0.0
    # the returned schedule is the caller's incumbent, not a popped goal
    from_incumbent: bool = False


def reconstruct(node: Node, problem: Problem) -> Schedule:
    """Schedule for the path ending at ``node``, with per-order ship laws."""
    chain = []
    n = node
    while n is not None:
        chain.append(n)
        n = n.parent
    chain.reverse()
    ops = []
    per_order = {}
    for prev, cur in zip(chain, chain[1:]):
        op = cur.via
        ops.append(op)
        if isinstance(op, Ship):
            o = problem.order(op.order)
            late = dist.prob_greater(prev.cost.time, o.deadline)
            per_order[op.order] = OrderOutcome(prev.cost.time, late, o.weight * late)
    return Schedule(tuple(ops), node.cost, per_order)


def solve(
    problem: Problem,
    heuristic: str = "max",
    *,
    prune: bool = True,
    max_expansions: Optional[int] = None,
    max_seconds: Optional[float] = None,
    check_monotone: Optional[bool] = None,
    on_expand: Optional[Callable[[Node], None]] = None,
    incumbent: Optional[Sequence] = None,
):
    """Optimal schedule for ``problem`` and search statistics.

    ``check_monotone`` (default: on for the consistent ``zero`` and
    ``parallel`` modes) raises SearchInvariantError if a popped priority
    ever drops below an earlier one. ``prune=False`` turns off dominance
    pruning entirely (plain tree search), which is only sensible on small
    instances.

    ``incumbent`` is an operator sequence known to be legal for ``problem``.
    It is replayed once and returned instead of the search result whenever
    its expected penalty is strictly lower. Mathematically tied plans can
    differ by a few ulps, and this makes "never worse than the incumbent"
    hold exactly in floating point.
    """
    h_fn = get_heuristic(heuristic)
    if check_monotone is None:
        check_monotone = heuristic in ("zero", "parallel")
    t0 = time.perf_counter()
    stats = SearchStats()
    counter = itertools.count()
    frontier = Frontier()
    open_heap = []
    best_goal = None
    seeded = replay(problem, incumbent) if incumbent is not None else None

    def finish(sched):
        stats.wall_time = time.perf_counter() - t0
        if seeded is not None and (sched is None
                                   or seeded.expected_penalty < sched.expected_penalty):
            stats.from_incumbent = True
            return seeded, stats
        return sched, stats

    def push(node):
        nonlocal best_goal
        heapq.heappush(open_heap, (node.priority, node.h, node.seq, node))
        stats.generated += 1
        if len(open_heap) > stats.peak_open:
            stats.peak_open = len(open_heap)
        if is_goal(node.state) and (best_goal is None
                                    or node.cost.expected_penalty < best_goal.cost.expected_penalty):
            best_goal = node

    s0 = initial_state(problem)
    c0 = initial_cost(problem)
    root = Node(s0, c0, h_fn(s0, c0, problem), seq=next(counter))
    if prune:
        frontier.offer(root)
    push(root)

    last_priority = float("-inf")
    while open_heap:
        priority, _, _, node = heapq.heappop(open_heap)
        if not node.alive:
            continue
        if check_monotone and priority < last_priority - MONOTONE_TOL:
            raise SearchInvariantError(
                f"popped priority {priority} after {last_priority}; heuristic is not consistent")
        last_priority = max(last_priority, priority)

        if is_goal(node.state):
            return finish(reconstruct(node, problem))

        if max_expansions is not None and stats.expansions >= max_expansions:
            _limit("expansion limit reached", best_goal, seeded, problem, stats, t0)
        if max_seconds is not None and time.perf_counter() - t0 > max_seconds:
            _limit("time limit reached", best_goal, seeded, problem, stats, t0)

        stats.expansions += 1
        if on_expand is not None:
            on_expand(node)
        for op in applicable_operators(node.state, problem):
            child_state = _apply(node.state, op, problem)
            child_cost = transition_cost(node.cost, op, problem)
            child = Node(child_state, child_cost, 0.0, node, op, next(counter))
            if prune:
                accepted, retired = frontier.offer(child)
                stats.dominations += len(retired)
                if not accepted:
                    stats.dominations += 1
                    continue
            child.h = h_fn(child_state, child_cost, problem)
            push(child)

    # every order can always be shipped eventually, so this means a bad instance
    if seeded is not None:
        return finish(None)
    stats.wall_time = time.perf_counter() - t0
    raise SearchInvariantError("open list exhausted without reaching a goal state")


def _limit(message, best_goal, seeded, problem, stats, t0):
    stats.wall_time = time.perf_counter() - t0
    incumbent = reconstruct(best_goal, problem) if best_goal is not None else None
    if seeded is not None and (incumbent is None
                               or seeded.expected_penalty < incumbent.expected_penalty):
        incumbent = seeded
    raise SearchLimitError(message, incumbent=incumbent, stats=stats)
