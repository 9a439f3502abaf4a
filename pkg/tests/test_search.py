import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdastar import dist, gen
from sdastar.errors import SearchLimitError
from sdastar.model import (Make, Order, PathCost, Problem, Product, Setup, Ship, replay)
from sdastar.search import Frontier, Node, dominated_by, reconstruct, solve

from oracles import enumerate_restricted, small_instance

A1 = (Make("X", 11), Ship("R1"), Setup("Y"), Make("Y", 8), Ship("R2"))
A2 = (Setup("Y"), Make("Y", 8), Ship("R2"), Setup("X"), Make("X", 11), Ship("R1"))


def test_dominated_by_identical_costs_both_ways():
    c = PathCost(0.2, dist.truncated_normal(100, 3))
    d = PathCost(0.2, dist.truncated_normal(100, 3))
    assert dominated_by(c, d) and dominated_by(d, c)


def test_dominated_by_point_masses():
    b = PathCost(0.1, dist.point_mass(470))
    a = PathCost(0.2, dist.point_mass(475))
    assert dominated_by(a, b)
    assert not dominated_by(b, a)


def test_not_dominated_when_laws_cross():
    b = PathCost(0.1, dist.truncated_normal(470, 9))
    a = PathCost(0.3, dist.truncated_normal(475, 1))
    # sweep of the CDFs: b is ahead at 460, a is ahead at 478
    assert b.time.cdf(460) > a.time.cdf(460)
    assert b.time.cdf(478) < a.time.cdf(478)
    assert not dominated_by(a, b)
    assert not dominated_by(b, a)


def test_two_order_equal_weights_picks_a1():
    sched, stats = solve(gen.two_order_problem(1, 1))
    assert sched.operators == A1
    assert sched.expected_penalty == pytest.approx(0.125, abs=0.005)
    assert stats.expansions > 0


def test_two_order_heavy_r2_picks_a2():
    p = gen.two_order_problem(1, 3)
    sched, _ = solve(p)
    assert sched.operators == A2
    assert sched.expected_penalty == pytest.approx(0.284, abs=0.01)
    assert replay(p, A1).expected_penalty == pytest.approx(0.375, abs=0.015)


def test_generous_deadlines_give_zero_penalty():
    base = gen.sample_orders_problem()
    from sdastar.model import worst_case_makespan
    far = worst_case_makespan(base) + 1
    p = base.with_weights({})
    from dataclasses import replace
    p = replace(p, orders=tuple(replace(o, deadline=far) for o in p.orders))
    sched, _ = solve(p)
    assert sched.expected_penalty == 0.0


def test_zero_order_problem():
    p = Problem((Product("A", 1.0, 0.0, 0.0, 0.0),), (), "A")
    sched, stats = solve(p)
    assert sched.operators == () and sched.expected_penalty == 0.0


def test_reconstruct_round_trip():
    p = gen.two_order_problem(1, 3, with_r3=True)
    sched, _ = solve(p)
    again = replay(p, sched.operators)
    assert again.expected_penalty == sched.expected_penalty
    assert dist.max_abs_diff(again.cost.time, sched.cost.time) == 0
    for oid, oc in sched.per_order.items():
        assert again.per_order[oid].late_prob == oc.late_prob


@pytest.mark.parametrize("seed", range(25))
def test_three_order_instances_match_brute_force(seed):
    p = small_instance(seed, n_orders=3)
    best, _ = enumerate_restricted(p)
    sched, _ = solve(p)
    assert sched.expected_penalty == pytest.approx(best, abs=1e-9)


@pytest.mark.parametrize("seed", range(15))
def test_pruning_does_not_change_optimum(seed):
    p = small_instance(seed, n_orders=4)
    pruned, s1 = solve(p)
    full, s2 = solve(p, prune=False)
    assert pruned.expected_penalty == pytest.approx(full.expected_penalty, abs=1e-9)
    assert s1.generated <= s2.generated


@pytest.mark.parametrize("mode", ["zero", "parallel"])
def test_pop_priorities_nondecreasing(mode):
    pops = []
    for seed in range(10):
        p = small_instance(seed, n_orders=4)
        pops.clear()
        solve(p, mode, check_monotone=True, on_expand=lambda n: pops.append(n.priority))
        assert all(b >= a - 1e-9 for a, b in zip(pops, pops[1:]))


def test_expansion_limit_raises_with_incumbent():
    p = gen.generate(gen.GenSpec(n_orders=8, target_capacity=1.1, seed=2))
    with pytest.raises(SearchLimitError) as e:
        solve(p, max_expansions=5)
    assert e.value.stats.expansions == 5
    with pytest.raises(SearchLimitError):
        solve(p, max_seconds=0.0)


def test_incumbent_is_a_valid_schedule():
    p = gen.two_order_problem(1, 1)
    with pytest.raises(SearchLimitError) as e:
        solve(p, "zero", max_expansions=5)
    inc = e.value.incumbent
    if inc is not None:
        assert replay(p, inc.operators).expected_penalty == inc.expected_penalty


@st.composite
def path_costs(draw):
    n = draw(st.integers(1, 6))
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    off = draw(st.integers(0, 8))
    pen = draw(st.sampled_from([0.0, 0.5, 1.0, 1.5]))
    return PathCost(pen, dist.from_weights(w, off, 0.25))


@settings(max_examples=80, deadline=None)
@given(st.lists(path_costs(), min_size=1, max_size=25))
def test_frontier_members_stay_mutually_nondominated(costs):
    fr = Frontier()
    state = gen.two_order_problem().products  # any hashable key works
    live = []
    for k, c in enumerate(costs):
        node = Node(state, c, 0.0, seq=k)
        accepted, retired = fr.offer(node)
        if accepted:
            live = [m for m in live if m not in retired] + [node]
        members = fr.members(state)
        assert set(map(id, members)) == set(map(id, live))
        for a in members:
            for b in members:
                if a is not b:
                    assert not dominated_by(a.cost, b.cost)
        # nothing offered so far beats every member without being kept
        assert all(m.alive for m in members)


def test_frontier_keeps_earlier_of_equal_costs():
    fr = Frontier()
    law = dist.truncated_normal(10, 1)
    first = Node("s", PathCost(0.0, law), 0.0, seq=0)
    second = Node("s", PathCost(0.0, law), 0.0, seq=1)
    assert fr.offer(first) == (True, [])
    assert fr.offer(second) == (False, [])
    assert fr.members("s") == [first]


def test_duplicate_ship_choices_all_explored():
    prods = (Product("A", 1.0, 0.2, 1.0, 0.0),)
    orders = (Order("a", "A", 3, 3.0, 1.0), Order("b", "A", 3, 6.5, 5.0))
    p = Problem(prods, orders, "A", grid_step=0.05)
    sched, _ = solve(p)
    # the heavier order must ship first
    assert sched.operators[1] == Ship("b")
    best, _ = enumerate_restricted(p)
    assert sched.expected_penalty == pytest.approx(best, abs=1e-12)


def test_incumbent_returned_only_when_strictly_better():
    p = gen.two_order_problem(1, 3)
    sched, stats = solve(p, incumbent=A1)
    assert sched.operators == A2 and not stats.from_incumbent
    # a tied incumbent leaves the search result in place
    sched, stats = solve(p, incumbent=A2)
    assert sched.operators == A2 and not stats.from_incumbent


def test_incumbent_wins_exact_float_ties(monkeypatch):
    p = gen.two_order_problem(1, 3)
    best, _ = solve(p)
    import sdastar.search as search_mod
    real = search_mod.reconstruct

    def worse(node, problem):
        s = real(node, problem)
        cost = PathCost(s.cost.expected_penalty + 1e-15, s.cost.time)
        return type(s)(s.operators, cost, s.per_order)

    monkeypatch.setattr(search_mod, "reconstruct", worse)
    sched, stats = solve(p, incumbent=best.operators)
    assert stats.from_incumbent and sched.expected_penalty == best.expected_penalty


def test_incumbent_offered_on_limit():
    p = gen.generate(gen.GenSpec(n_orders=8, target_capacity=1.1, seed=2))
    seed_ops = solve(p, "zero", max_seconds=60)[0].operators
    with pytest.raises(SearchLimitError) as e:
        solve(p, max_expansions=1, incumbent=seed_ops)
    assert e.value.incumbent.operators == seed_ops
