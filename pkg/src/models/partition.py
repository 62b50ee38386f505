"""
ℤ_sp の 9 分割を扱うモジュール

h(w) = (xs, yp) の各成分を {0}・核・残り の 3 つに分類し、その組で 9 つの部分集合を決める。

            yp=0          yp∈p𝕂_s       yp∈p𝔽_s**
  xs=0      ZERO          P_KERNEL      P_FIELD_REST
  xs∈s𝕂_p   S_KERNEL      RING_KERNEL   OFF_BY_ONE_P
  xs∈s𝔽_p** S_FIELD_REST  OFF_BY_ONE_S  D_SET
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Literal, Optional, Set

from sympy import primefactors

from models.errors import ensure_budget
from models.ring_core import RingContext, factor_pow2, h_join, h_split, pow2iter, CrtPair

logger = logging.getLogger(__name__)

Side = Literal["s", "p"]

__all__ = [
    "Side",
    "SubsetClass",
    "CardinalityReport",
    "factor_pow2",
    "embedded_field",
    "in_field_kernel",
    "field_kernel",
    "field_rest",
    "ring_kernel",
    "classify",
    "is_offbyone",
    "largest_prime_factor",
    "cardinalities",
    "class_counts",
    "enumerate_class",
]


class SubsetClass(str, Enum):
    """ℤ_sp の 9 つの互いに素な部分集合"""
    ZERO = "Zero"
    S_KERNEL = "SKernel"
    S_FIELD_REST = "SFieldRest"
    P_KERNEL = "PKernel"
    P_FIELD_REST = "PFieldRest"
    RING_KERNEL = "RingKernel"
    OFF_BY_ONE_S = "OffByOneS"
    OFF_BY_ONE_P = "OffByOneP"
    D_SET = "DSet"


_ZERO, _KERNEL, _REST = 0, 1, 2

# (xs のセル, yp のセル) -> 分類
_GRID = {
    (_ZERO, _ZERO): SubsetClass.ZERO,
    (_KERNEL, _ZERO): SubsetClass.S_KERNEL,
    (_REST, _ZERO): SubsetClass.S_FIELD_REST,
    (_ZERO, _KERNEL): SubsetClass.P_KERNEL,
    (_ZERO, _REST): SubsetClass.P_FIELD_REST,
    (_KERNEL, _KERNEL): SubsetClass.RING_KERNEL,
    (_REST, _KERNEL): SubsetClass.OFF_BY_ONE_S,
    (_KERNEL, _REST): SubsetClass.OFF_BY_ONE_P,
    (_REST, _REST): SubsetClass.D_SET,
}


@dataclass(frozen=True)
class CardinalityReport:
    """
    閉じた式による各集合の大きさ

    observed_max_cycle は graph_dynamics が埋める。𝔻_sp が空なら None のまま。
    """
    n_multiples: int
    n_offbyone: int
    n_dset: int
    n_kernel: int
    n_dset_cyclic: int
    claimed_max_cycle: int
    observed_max_cycle: Optional[int] = None

    def with_observed(self, max_cycle: Optional[int]) -> "CardinalityReport":
        return replace(self, observed_max_cycle=max_cycle)

    @property
    def max_cycle_mismatch(self) -> Optional[bool]:
        """主張値と観測値が食い違うか（観測値が無ければ None）"""
        if self.observed_max_cycle is None:
            return None
        return self.observed_max_cycle != self.claimed_max_cycle


def embedded_field(ctx: RingContext, side: Side) -> List[int]:
    """
    埋め込まれた体

    Args:
        ctx: コンテキスト
        side: "s" なら s𝔽_p（s の倍数）、"p" なら p𝔽_s（p の倍数）

    Returns:
        昇順の剰余のリスト
    """
    if side == "s":
        return [x * ctx.s for x in range(ctx.p)]
    return [y * ctx.p for y in range(ctx.s)]


def in_field_kernel(component: int, ctx: RingContext, side: Side) -> bool:
    # 位数が 2 のべきなら 2^l 回（p 側は 2^k 回）の平方で単位元に達する
    if component == 0:
        return False
    if side == "s":
        return pow2iter(component, ctx.l, ctx) == ctx.u_s
    return pow2iter(component, ctx.k, ctx) == ctx.u_p


def field_kernel(ctx: RingContext, side: Side) -> Set[int]:
    """
    埋め込まれた体の核

    Args:
        ctx: コンテキスト
        side: "s" なら s𝕂_p（大きさ 2^l）、"p" なら p𝕂_s（大きさ 2^k）

    Returns:
        核の元の集合
    """
    return {x for x in embedded_field(ctx, side) if in_field_kernel(x, ctx, side)}


def field_rest(ctx: RingContext, side: Side) -> Set[int]:
    """s𝔽_p** または p𝔽_s**（体 − 核 − {0}）"""
    return {x for x in embedded_field(ctx, side) if x != 0 and not in_field_kernel(x, ctx, side)}


def ring_kernel(ctx: RingContext) -> Set[int]:
    """
    𝕂_sp = h^{-1}(s𝕂_p × p𝕂_s)

    Returns:
        大きさ 2^(k+l) の集合
    """
    s_kernel = field_kernel(ctx, "s")
    p_kernel = field_kernel(ctx, "p")
    return {h_join(CrtPair(a, b), ctx) for a in s_kernel for b in p_kernel}


def _cell(component: int, ctx: RingContext, side: Side) -> int:
    if component == 0:
        return _ZERO
    return _KERNEL if in_field_kernel(component, ctx, side) else _REST


def classify(w: int, ctx: RingContext) -> SubsetClass:
    """
    w を 9 つの部分集合のいずれかに分類する

    Args:
        w: [0, N) の剰余
        ctx: コンテキスト

    Returns:
        SubsetClass
    """
    pair = h_split(w, ctx)
    return _GRID[(_cell(pair.xs, ctx, "s"), _cell(pair.yp, ctx, "p"))]


def is_offbyone(w: int, ctx: RingContext, side: Side) -> bool:
    """
    オフバイワン集合 p𝔽_s^e（side="p"）または s𝔽_p^e（side="s"）の特徴付け

    p𝔽_s^e − {yp = 0} = OFF_BY_ONE_P ∪ RING_KERNEL は
    w^(2^l) ≡ 1 (mod p) かつ w ≢ 0 (mod s) と同値。s 側は対称。
    """
    if side == "p":
        return w % ctx.s != 0 and pow(w, 1 << ctx.l, ctx.p) == 1
    return w % ctx.p != 0 and pow(w, 1 << ctx.k, ctx.s) == 1


def largest_prime_factor(m: int) -> int:
    """m の最大素因数。m <= 1 のときは 1 とする"""
    if m <= 1:
        return 1
    return max(primefactors(m))


def cardinalities(ctx: RingContext) -> CardinalityReport:
    """
    閉じた式で各集合の大きさを計算する

    Args:
        ctx: コンテキスト

    Returns:
        CardinalityReport（observed_max_cycle は未設定）
    """
    two_kl = 1 << (ctx.k + ctx.l)
    q_mm = largest_prime_factor(ctx.q - 1)
    r_mm = largest_prime_factor(ctx.r - 1)
    return CardinalityReport(
        n_multiples=ctx.s + ctx.p - 1,
        n_offbyone=two_kl * (ctx.q + ctx.r - 1),
        n_dset=two_kl * (ctx.q - 1) * (ctx.r - 1),
        n_kernel=two_kl,
        n_dset_cyclic=(ctx.q - 1) * (ctx.r - 1),
        claimed_max_cycle=math.lcm(q_mm, r_mm),
    )


def _classify_range(ctx: RingContext, start: int, stop: int) -> List[SubsetClass]:
    return [classify(w, ctx) for w in range(start, stop)]


def _classify_all(ctx: RingContext, workers: int) -> List[SubsetClass]:
    if workers <= 1 or ctx.N < 4096:
        return _classify_range(ctx, 0, ctx.N)

    chunk = -(-ctx.N // workers)
    bounds = [(start, min(start + chunk, ctx.N)) for start in range(0, ctx.N, chunk)]
    logger.debug("N=%d を %d チャンクに分割して分類します", ctx.N, len(bounds))
    tags: List[SubsetClass] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_classify_range, ctx, start, stop) for start, stop in bounds]
        # チャンク順に結合するので結果はスケジュールに依存しない
        for future in futures:
            tags.extend(future.result())
    return tags


def class_counts(ctx: RingContext, budget: int, workers: int = 1) -> Dict[SubsetClass, int]:
    """
    全要素を分類して各部分集合の大きさを数える

    Raises:
        BudgetExceededError: N が予算を超える場合
    """
    ensure_budget(ctx.N, budget)
    counts = {tag: 0 for tag in SubsetClass}
    for tag in _classify_all(ctx, workers):
        counts[tag] += 1
    return counts


def enumerate_class(ctx: RingContext, tag: SubsetClass, budget: int, workers: int = 1) -> List[int]:
    """
    指定した部分集合の元を昇順で列挙する

    Args:
        ctx: コンテキスト
        tag: 部分集合
        budget: 要素数の上限
        workers: 並列に分類するプロセス数

    Returns:
        昇順の剰余のリスト

    Raises:
        BudgetExceededError: N が予算を超える場合
    """
    ensure_budget(ctx.N, budget)
    tags = _classify_all(ctx, workers)
    return [w for w, t in enumerate(tags) if t == tag]
