"""
平方写像の関数グラフ

閉じた定義域の上で巡回（サイクル）と、巡回元に吊り下がる逆像の木を扱う。
"""
import logging
import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from models.errors import DomainNotClosedError, NotCyclicError, PreconditionError, ensure_budget
from models.partition import SubsetClass, enumerate_class
from models.ring_core import CrtPair, RingContext, cycle_length, h_join, h_split, is_cyclic, pow2iter, sqrt_mod_N

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CycleRecord:
    """
    平方写像の巡回

    nodes は最小の剰余から始まり nodes[t+1] = nodes[t]^2 mod N。
    s_period は w mod s の周期 μ、p_period は w mod p の周期 ν。
    """
    nodes: Tuple[int, ...]
    s_period: int
    p_period: int

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def s_laps(self) -> int:
        return self.length // self.s_period

    @property
    def p_laps(self) -> int:
        return self.length // self.p_period


@dataclass(frozen=True)
class RootedTree:
    """
    巡回元 root を根とする逆像の木

    levels[0] = (root,)。各レベルは昇順。parent[c] = c^2 mod N。
    """
    root: int
    height: int
    levels: Tuple[Tuple[int, ...], ...]
    parent: Dict[int, int]

    @property
    def nodes(self) -> Set[int]:
        return {w for level in self.levels for w in level}

    @property
    def size(self) -> int:
        return sum(len(level) for level in self.levels)


@dataclass(frozen=True)
class Arc:
    """巡回上を逆にたどった鎖 (a_0, ..., a_n)。a_{i-1} = a_i^2 mod N"""
    nodes: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class InnerCycles:
    """
    巡回を CRT 成分へ射影したもの

    s_reduced は yp 成分（w mod s を担う p𝔽_s の巡回、長さ μ）、
    p_reduced は xs 成分（w mod p を担う s𝔽_p の巡回、長さ ν）。
    """
    s_reduced: Tuple[int, ...]
    s_laps: int
    p_reduced: Tuple[int, ...]
    p_laps: int


def _rotate_to_min(nodes: Sequence[int]) -> Tuple[int, ...]:
    start = min(range(len(nodes)), key=nodes.__getitem__)
    return tuple(nodes[start:]) + tuple(nodes[:start])


def _period(nodes: Sequence[int], modulus: int) -> int:
    first = nodes[0] % modulus
    for d in range(1, len(nodes) + 1):
        if nodes[d % len(nodes)] % modulus == first:
            return d
    return len(nodes)


def _make_cycle(nodes: Sequence[int], ctx: RingContext) -> CycleRecord:
    ordered = _rotate_to_min(nodes)
    return CycleRecord(nodes=ordered, s_period=_period(ordered, ctx.s), p_period=_period(ordered, ctx.p))


def _check_cycle(nodes: Sequence[int], ctx: RingContext) -> None:
    if not nodes:
        raise NotCyclicError("空の巡回です。")
    for t, w in enumerate(nodes):
        if w * w % ctx.N != nodes[(t + 1) % len(nodes)]:
            raise NotCyclicError(f"{w} の平方が巡回の次の元と一致しません。")
    if len(set(nodes)) != len(nodes):
        raise NotCyclicError("巡回に重複した元があります。")


class FunctionalGraph:
    """
    閉じた定義域上の平方写像のグラフ

    Attributes:
        ctx: コンテキスト
        successor: w -> w^2 mod N
        predecessors: w -> 定義域内の平方根（昇順）
        cycles: 最小元の昇順に並べた巡回の一覧
    """

    def __init__(self, ctx: RingContext, successor: Dict[int, int], cycles: List[CycleRecord]):
        self.ctx = ctx
        self.successor = successor
        self.cycles = cycles
        self.predecessors: Dict[int, List[int]] = {w: [] for w in successor}
        for w in sorted(successor):
            self.predecessors[successor[w]].append(w)
        self.cyclic_nodes: Set[int] = {w for cycle in cycles for w in cycle.nodes}

    @property
    def tree_roots(self) -> List[int]:
        """巡回以外の逆像を持つ巡回元"""
        return [w for w in sorted(self.cyclic_nodes) if any(v not in self.cyclic_nodes for v in self.predecessors[w])]

    def tree(self, root: int) -> RootedTree:
        """
        グラフから root を根とする木を読み取る

        Raises:
            NotCyclicError: root が巡回元でない場合
        """
        if root not in self.cyclic_nodes:
            raise NotCyclicError(f"{root} はこのグラフの巡回元ではありません。")
        levels: List[Tuple[int, ...]] = [(root,)]
        parent: Dict[int, int] = {}
        frontier = [v for v in self.predecessors[root] if v not in self.cyclic_nodes]
        while frontier:
            for v in frontier:
                parent[v] = self.successor[v]
            levels.append(tuple(sorted(frontier)))
            frontier = [v for u in frontier for v in self.predecessors[u]]
        return RootedTree(root=root, height=len(levels) - 1, levels=tuple(levels), parent=parent)

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.successor.items())


def build_graph(domain: Iterable[int], ctx: RingContext, budget: Optional[int] = None) -> FunctionalGraph:
    """
    平方写像の関数グラフを構成する

    Args:
        domain: 平方写像で閉じた剰余の集合
        ctx: コンテキスト
        budget: 定義域の大きさの上限

    Raises:
        DomainNotClosedError: 定義域が平方写像で閉じていない場合
        BudgetExceededError: 定義域が予算を超える場合
    """
    nodes = sorted(set(domain))
    if budget is not None:
        ensure_budget(len(nodes), budget)
    members = set(nodes)
    successor: Dict[int, int] = {}
    for w in nodes:
        image = w * w % ctx.N
        if image not in members:
            raise DomainNotClosedError(f"{w}^2 = {image} が定義域に含まれません。")
        successor[w] = image

    # 0: 未訪問, 1: 現在の経路上, 2: 確定
    state = dict.fromkeys(nodes, 0)
    cycles: List[CycleRecord] = []
    for start in nodes:
        if state[start]:
            continue
        path: List[int] = []
        w = start
        while state[w] == 0:
            state[w] = 1
            path.append(w)
            w = successor[w]
        if state[w] == 1:
            cycles.append(_make_cycle(path[path.index(w):], ctx))
        for v in path:
            state[v] = 2

    cycles.sort(key=lambda c: c.nodes[0])
    logger.debug("グラフ構成: %d 節点, %d 巡回", len(nodes), len(cycles))
    return FunctionalGraph(ctx, successor, cycles)


def cycles_of(domain: Iterable[int], ctx: RingContext, budget: Optional[int] = None) -> List[CycleRecord]:
    """定義域に含まれる巡回をすべて返す"""
    return build_graph(domain, ctx, budget).cycles


def tree_of(a: int, height: int, ctx: RingContext) -> RootedTree:
    """
    巡回元 a を根とする高さ height の木を平方根の幅優先探索で作る

    レベル 1 では a の巡回する平方根 a^(2^(θ-1)) を除く。空のレベルも height まで残す。

    Raises:
        NotCyclicError: a が巡回元でない場合
    """
    if not is_cyclic(a, ctx):
        raise NotCyclicError(f"{a} は巡回元ではありません。")
    if height < 0:
        raise PreconditionError(f"高さは 0 以上である必要があります: {height}")
    cyclic_root = pow2iter(a, cycle_length(a, ctx) - 1, ctx)

    levels: List[Tuple[int, ...]] = [(a,)]
    parent: Dict[int, int] = {}
    frontier = sorted(sqrt_mod_N(a, ctx) - {cyclic_root})
    for _ in range(height):
        for v in frontier:
            parent[v] = v * v % ctx.N
        levels.append(tuple(frontier))
        frontier = sorted(v for u in frontier for v in sqrt_mod_N(u, ctx))
    return RootedTree(root=a, height=height, levels=tuple(levels), parent=parent)


def level_of(w: int, tree: RootedTree) -> int:
    """
    木の中での w のレベル

    Raises:
        PreconditionError: w が木に含まれない場合
    """
    for i, level in enumerate(tree.levels):
        if w in level:
            return i
    raise PreconditionError(f"{w} は根 {tree.root} の木に含まれません。")


def child_counts(tree: RootedTree) -> Dict[int, int]:
    """各節点の子の数（葉は 0）"""
    counts = {w: 0 for w in tree.nodes}
    for parent in tree.parent.values():
        counts[parent] += 1
    return counts


def arc_of(a: int, n: int, ctx: RingContext) -> Arc:
    """
    巡回元 a から巡回を n 歩さかのぼった弧

    巡回する平方根は x^(2^(θ-1)) で一意に決まる。n が θ を超えると巡回を周回する。

    Raises:
        NotCyclicError: a が巡回元でない場合
    """
    theta = cycle_length(a, ctx)
    nodes = [a]
    for _ in range(n):
        nodes.append(pow2iter(nodes[-1], theta - 1, ctx))
    return Arc(nodes=tuple(nodes))


def arc_tree_mul(arc: Arc, tree: RootedTree, ctx: RingContext) -> RootedTree:
    """
    弧と木の積 c_ij = a_i * b_ij mod N

    Raises:
        PreconditionError: 弧の長さと木の高さが違う、または弧の元が N と互いに素でない場合
    """
    if arc.length != tree.height:
        raise PreconditionError(f"弧の長さ {arc.length} と木の高さ {tree.height} が一致しません。")
    for a in reversed(arc.nodes):
        if math.gcd(a, ctx.N) != 1:
            raise PreconditionError(f"弧の元 {a} は N = {ctx.N} と互いに素ではありません。")

    levels = tuple(
        tuple(sorted(a_i * b % ctx.N for b in level))
        for a_i, level in zip(arc.nodes, tree.levels)
    )
    parent = {c: c * c % ctx.N for level in levels[1:] for c in level}
    return RootedTree(root=levels[0][0], height=tree.height, levels=levels, parent=parent)


def _check_field_cycle(nodes: Sequence[int], divisor: int, name: str, ctx: RingContext) -> None:
    _check_cycle(nodes, ctx)
    if any(w % divisor for w in nodes):
        raise PreconditionError(f"巡回 {tuple(nodes)} は {name} に含まれません。")


def combine_cycles(s_field_cycle: CycleRecord, p_field_cycle: CycleRecord, ctx: RingContext) -> List[CycleRecord]:
    """
    s𝔽_p の巡回と p𝔽_s の巡回から ℤ_N の巡回を組み立てる

    長さ lcm の巡回が gcd 個できる。δ 番目の巡回は Cs[(t+δ) mod |Cs|] と Cp[t mod |Cp|] を組にする。

    Args:
        s_field_cycle: s𝔽_p の巡回
        p_field_cycle: p𝔽_s の巡回
        ctx: コンテキスト

    Raises:
        PreconditionError: 入力がそれぞれの体の巡回でない場合
    """
    cs, cp = s_field_cycle.nodes, p_field_cycle.nodes
    _check_field_cycle(cs, ctx.s, "s𝔽_p", ctx)
    _check_field_cycle(cp, ctx.p, "p𝔽_s", ctx)

    count = math.gcd(len(cs), len(cp))
    length = math.lcm(len(cs), len(cp))
    combined = [
        _make_cycle([h_join(CrtPair(cs[(t + delta) % len(cs)], cp[t % len(cp)]), ctx) for t in range(length)], ctx)
        for delta in range(count)
    ]
    return sorted(combined, key=lambda c: c.nodes[0])


def inner_cycles(cycle: CycleRecord, ctx: RingContext) -> InnerCycles:
    """
    巡回の内部巡回

    Raises:
        NotCyclicError: 入力が巡回でない場合
    """
    _check_cycle(cycle.nodes, ctx)
    pairs = [h_split(w, ctx) for w in cycle.nodes]
    mu = _period(cycle.nodes, ctx.s)
    nu = _period(cycle.nodes, ctx.p)
    return InnerCycles(
        s_reduced=tuple(pair.yp for pair in pairs[:mu]),
        s_laps=cycle.length // mu,
        p_reduced=tuple(pair.xs for pair in pairs[:nu]),
        p_laps=cycle.length // nu,
    )


def cycle_histogram(cycles: Iterable[CycleRecord]) -> Dict[int, int]:
    """巡回の長さ -> 個数（長さの昇順）"""
    counts = Counter(cycle.length for cycle in cycles)
    return dict(sorted(counts.items()))


def observed_max_dset_cycle(ctx: RingContext, budget: int, workers: int = 1) -> Optional[int]:
    """
    𝔻_sp に含まれる最長の巡回の長さ

    Returns:
        最長の長さ。𝔻_sp が空なら None
    """
    longest: Optional[int] = None
    for w in enumerate_class(ctx, SubsetClass.D_SET, budget, workers):
        if is_cyclic(w, ctx):
            theta = cycle_length(w, ctx)
            longest = theta if longest is None else max(longest, theta)
    return longest
