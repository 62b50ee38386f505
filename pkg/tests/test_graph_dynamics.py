import math
from collections import Counter

import pytest

from conftest import FULL_PAIRS, SMALL_PAIRS
from models.errors import BudgetExceededError, DomainNotClosedError, NotCyclicError, PreconditionError
from models.graph_dynamics import (
    Arc,
    arc_of,
    arc_tree_mul,
    build_graph,
    child_counts,
    combine_cycles,
    cycle_histogram,
    cycles_of,
    inner_cycles,
    level_of,
    observed_max_dset_cycle,
    tree_of,
)
from models.partition import embedded_field, field_kernel, ring_kernel
from models.ring_core import build_context, cycle_length


def test_full_ring_histogram_11_23(ctx_11_23):
    graph = build_graph(range(ctx_11_23.N), ctx_11_23)
    assert cycle_histogram(graph.cycles) == {1: 4, 4: 2, 10: 2, 20: 2}


def test_p_field_cycles_11_23(ctx_11_23):
    cycles = cycles_of(embedded_field(ctx_11_23, "p"), ctx_11_23)
    assert [c.nodes for c in cycles] == [(0,), (23,), (69, 207, 92, 115)]
    assert cycles[2].s_period == 4
    assert cycles[2].p_period == 1


def test_build_graph_rejects_open_domain(ctx_11_23):
    with pytest.raises(DomainNotClosedError):
        build_graph([3], ctx_11_23)
    with pytest.raises(BudgetExceededError):
        build_graph(range(ctx_11_23.N), ctx_11_23, budget=10)


def test_cycles_start_at_minimum(ctx_29_41):
    for cycle in cycles_of(range(ctx_29_41.N), ctx_29_41):
        assert cycle.nodes[0] == min(cycle.nodes)
        for t, w in enumerate(cycle.nodes):
            assert w * w % ctx_29_41.N == cycle.nodes[(t + 1) % cycle.length]


def test_tree_of_examples(ctx_11_23):
    tree = tree_of(3, 1, ctx_11_23)
    assert tree.levels == ((3,), (39, 214, 237))
    assert level_of(214, tree) == 1
    assert level_of(3, tree) == 0
    with pytest.raises(PreconditionError):
        level_of(16, tree)
    with pytest.raises(NotCyclicError):
        tree_of(24, 1, ctx_11_23)


def test_tree_of_keeps_empty_levels(ctx_11_23):
    tree = tree_of(3, 3, ctx_11_23)
    assert tree.height == 3
    assert len(tree.levels) == 4
    assert tree.levels[2] == () and tree.levels[3] == ()


def test_kernel_tree_29_41(ctx_29_41):
    tree = tree_of(1, ctx_29_41.n, ctx_29_41)
    assert tree.size == 32
    assert tree.nodes == ring_kernel(ctx_29_41)
    assert child_counts(tree)[1] == 3


@pytest.mark.parametrize("s, p", SMALL_PAIRS)
def test_kernel_tree_is_ring_kernel(s, p):
    ctx = build_context(s, p)
    tree = tree_of(1, ctx.n, ctx)
    assert tree.nodes == ring_kernel(ctx)
    assert tree.size == 1 << (ctx.k + ctx.l)


def test_graph_tree_matches_tree_of(ctx_11_23):
    graph = build_graph(range(ctx_11_23.N), ctx_11_23)
    for root in graph.tree_roots:
        from_graph = graph.tree(root)
        built = tree_of(root, from_graph.height, ctx_11_23)
        assert from_graph.levels == built.levels
        assert from_graph.parent == built.parent
    with pytest.raises(NotCyclicError):
        graph.tree(24)


def test_arc_of(ctx_11_23):
    assert arc_of(3, 1, ctx_11_23).nodes == (3, 16)
    arc = arc_of(69, 5, ctx_11_23)
    assert arc.nodes == (69, 115, 92, 207, 69, 115)
    assert arc.length == 5


def test_arc_tree_mul_reproduces_tree(ctx_11_23):
    product = arc_tree_mul(arc_of(3, 1, ctx_11_23), tree_of(1, 1, ctx_11_23), ctx_11_23)
    assert product.levels == tree_of(3, 1, ctx_11_23).levels


def _assert_arc_tree_mul(s, p):
    ctx = build_context(s, p)
    kernel_tree = tree_of(1, ctx.n, ctx)
    cyclic = build_graph(range(ctx.N), ctx).cyclic_nodes
    for a in sorted(w for w in cyclic if math.gcd(w, ctx.N) == 1):
        product = arc_tree_mul(arc_of(a, ctx.n, ctx), kernel_tree, ctx)
        direct = tree_of(a, ctx.n, ctx)
        assert product.levels == direct.levels, a
        assert product.parent == direct.parent, a


@pytest.mark.parametrize("s, p", SMALL_PAIRS)
def test_arc_tree_mul_all_units(s, p):
    _assert_arc_tree_mul(s, p)


@pytest.mark.slow
@pytest.mark.parametrize("s, p", FULL_PAIRS)
def test_arc_tree_mul_all_units_full(s, p):
    _assert_arc_tree_mul(s, p)


def test_arc_tree_mul_preconditions(ctx_11_23):
    with pytest.raises(PreconditionError, match="115"):
        arc_tree_mul(arc_of(69, 1, ctx_11_23), tree_of(1, 1, ctx_11_23), ctx_11_23)
    with pytest.raises(PreconditionError):
        arc_tree_mul(Arc(nodes=(3,)), tree_of(1, 1, ctx_11_23), ctx_11_23)


def _assert_combine_covers_ring(s, p):
    ctx = build_context(s, p)
    s_cycles = cycles_of(embedded_field(ctx, "s"), ctx)
    p_cycles = cycles_of(embedded_field(ctx, "p"), ctx)
    combined = []
    for cs in s_cycles:
        for cp in p_cycles:
            produced = combine_cycles(cs, cp, ctx)
            assert len(produced) == math.gcd(cs.length, cp.length)
            assert all(c.length == math.lcm(cs.length, cp.length) for c in produced)
            combined.extend(produced)
    expected = cycles_of(range(ctx.N), ctx)
    assert sorted(c.nodes for c in combined) == sorted(c.nodes for c in expected)


@pytest.mark.parametrize("s, p", SMALL_PAIRS + [(29, 41), (13, 37)])
def test_combine_cycles_covers_ring(s, p):
    _assert_combine_covers_ring(s, p)


@pytest.mark.slow
@pytest.mark.parametrize("s, p", FULL_PAIRS)
def test_combine_cycles_covers_ring_full(s, p):
    _assert_combine_covers_ring(s, p)


def _steps_to(x, target, N):
    # x を平方して target に達するまでの回数
    steps = 0
    while x != target:
        x = x * x % N
        steps += 1
    return steps


def _assert_kernel_tree_shape(s, p):
    ctx = build_context(s, p)
    N = ctx.N
    tree = tree_of(1, ctx.n, ctx)
    assert tree.size == 2 ** (ctx.k + ctx.l)
    assert tree.height == max(ctx.k, ctx.l)
    assert tree.nodes == set(ring_kernel(ctx))

    s_kernel, p_kernel = field_kernel(ctx, "s"), field_kernel(ctx, "p")
    counts = child_counts(tree)
    # 根 1 の自己ループを除いて平方から直接数えた子の数
    squares = Counter(v * v % N for v in tree.nodes if v != 1)
    for w in tree.nodes:
        xs, yp = ctx.u_s * w % N, ctx.u_p * w % N
        assert counts[w] == squares[w], w
        s_branch = sum(1 for e in s_kernel if e * e % N == xs)
        p_branch = sum(1 for e in p_kernel if e * e % N == yp)
        assert counts[w] == s_branch * p_branch - (w == 1), w

        expected_level = max(_steps_to(xs, ctx.u_s, N), _steps_to(yp, ctx.u_p, N))
        assert level_of(w, tree) == expected_level, w


@pytest.mark.parametrize("s, p", SMALL_PAIRS + [(29, 41), (17, 97), (41, 193)])
def test_kernel_tree_shape_and_levels(s, p):
    _assert_kernel_tree_shape(s, p)


@pytest.mark.slow
@pytest.mark.parametrize("s, p", FULL_PAIRS)
def test_kernel_tree_shape_and_levels_full(s, p):
    _assert_kernel_tree_shape(s, p)


def test_combine_cycles_argument_order(ctx_11_23):
    s_cycle = cycles_of(embedded_field(ctx_11_23, "s"), ctx_11_23)[-1]
    p_cycle = cycles_of(embedded_field(ctx_11_23, "p"), ctx_11_23)[-1]
    with pytest.raises(PreconditionError):
        combine_cycles(p_cycle, s_cycle, ctx_11_23)


@pytest.mark.parametrize("s, p", [(11, 23), (29, 41), (13, 37)])
def test_inner_cycles(s, p):
    ctx = build_context(s, p)
    for cycle in cycles_of(range(ctx.N), ctx):
        inner = inner_cycles(cycle, ctx)
        assert len(inner.s_reduced) == cycle.s_period
        assert len(inner.p_reduced) == cycle.p_period
        assert inner.s_laps * cycle.s_period == cycle.length
        assert inner.p_laps * cycle.p_period == cycle.length
        assert all(y % ctx.p == 0 for y in inner.s_reduced)
        assert all(x % ctx.s == 0 for x in inner.p_reduced)
        assert cycle.length == math.lcm(cycle.s_period, cycle.p_period)


def test_observed_max_dset_cycle(ctx_11_23):
    assert observed_max_dset_cycle(ctx_11_23, budget=10**4) == 20
    assert cycle_length(3, ctx_11_23) == 20


def test_observed_max_dset_cycle_empty():
    # s = 3, p = 5: q = r = 1 なので 𝔻_sp は空
    ctx = build_context(3, 5)
    assert observed_max_dset_cycle(ctx, budget=100) is None


def test_kernel_graph_29_41(ctx_29_41):
    graph = build_graph(ring_kernel(ctx_29_41), ctx_29_41)
    assert [c.nodes for c in graph.cycles] == [(1,)]
    tree = graph.tree(1)
    assert tree.size == 32
    assert tree.height == 3
    assert [len(level) for level in tree.levels] == [1, 3, 12, 16]
    assert level_of(916, tree) == 3
    assert build_graph([0], ctx_29_41).cycles[0].nodes == (0,)


def test_s_field_cycles_11_23(ctx_11_23):
    lengths = sorted(c.length for c in cycles_of(embedded_field(ctx_11_23, "s"), ctx_11_23))
    assert lengths == [1, 1, 10]
    nodes = [c.nodes for c in cycles_of(embedded_field(ctx_11_23, "s"), ctx_11_23) if c.length == 1]
    assert nodes == [(0,), (231,)]


def test_small_trees_and_arcs(ctx_11_23):
    tree = tree_of(1, 1, ctx_11_23)
    assert tree.levels == ((1,), (45, 208, 252))
    assert level_of(45, tree) == 1
    assert arc_of(1, 2, ctx_11_23).nodes == (1, 1, 1)
    assert arc_of(69, 2, ctx_11_23).nodes == (69, 115, 92)
    assert arc_tree_mul(arc_of(1, 1, ctx_11_23), tree, ctx_11_23).levels == tree.levels


def test_combine_documented_cycles(ctx_11_23):
    s_cycles = cycles_of(embedded_field(ctx_11_23, "s"), ctx_11_23)
    p_cycles = cycles_of(embedded_field(ctx_11_23, "p"), ctx_11_23)
    ten = next(c for c in s_cycles if c.length == 10)
    four = next(c for c in p_cycles if c.length == 4)
    combined = combine_cycles(ten, four, ctx_11_23)
    assert [c.length for c in combined] == [20, 20]

    unit_s = next(c for c in s_cycles if c.nodes == (231,))
    unit_p = next(c for c in p_cycles if c.nodes == (23,))
    assert [c.nodes for c in combine_cycles(unit_s, unit_p, ctx_11_23)] == [(1,)]

    inner = inner_cycles(combined[0], ctx_11_23)
    assert (len(inner.s_reduced), inner.s_laps) == (4, 5)
    assert (len(inner.p_reduced), inner.p_laps) == (10, 2)

    field_inner = inner_cycles(ten, ctx_11_23)
    assert (len(field_inner.p_reduced), len(field_inner.s_reduced)) == (10, 1)
    assert field_inner.s_reduced == (0,)
