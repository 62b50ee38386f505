"""
全数計算による参照実装

テストと verify コマンドのためのもので、定義どおりに愚直に計算する。
CRT による近道や他モジュールの算術は使わない。
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from models.errors import ensure_budget
from models.partition import SubsetClass


@dataclass(frozen=True)
class BruteGraph:
    """
    ℤ_N 全体の平方写像の表

    cycle_id は巡回元なら巡回の番号、それ以外は -1。tree_root は到達する最初の巡回元。
    """
    N: int
    successor: np.ndarray
    is_cyclic: np.ndarray
    cycle_id: np.ndarray
    tree_root: np.ndarray

    def cycles(self) -> List[Tuple[int, ...]]:
        """巡回を最小元から始めた組の一覧（最小元の昇順）"""
        found = []
        for w in np.flatnonzero(self.is_cyclic):
            w = int(w)
            nodes = [w]
            v = int(self.successor[w])
            while v != w:
                nodes.append(v)
                v = int(self.successor[v])
            if w == min(nodes):
                found.append(tuple(nodes))
        return sorted(found)

    def cycle_lengths(self) -> List[int]:
        return sorted(len(c) for c in self.cycles())


def brute_graph(N: int, budget: Optional[int] = None) -> BruteGraph:
    """
    ℤ_N の全要素について平方写像をたどり、巡回と木を塗り分ける

    Raises:
        BudgetExceededError: N が予算を超える場合
    """
    if budget is not None:
        ensure_budget(N, budget)
    dtype = np.int64 if N < (1 << 31) else object
    w = np.arange(N, dtype=dtype)
    successor = w * w % N if N > 0 else w

    # 0: 未訪問, 1: 現在の経路上, 2: 確定
    color = np.zeros(N, dtype=np.int8)
    is_cyclic = np.zeros(N, dtype=bool)
    cycle_id = np.full(N, -1, dtype=np.int64)
    next_id = 0
    for start in range(N):
        if color[start]:
            continue
        path = []
        v = start
        while color[v] == 0:
            color[v] = 1
            path.append(v)
            v = int(successor[v])
        if color[v] == 1:
            loop = path[path.index(v):]
            is_cyclic[loop] = True
            cycle_id[loop] = next_id
            next_id += 1
        color[path] = 2

    tree_root = np.full(N, -1, dtype=np.int64)
    tree_root[is_cyclic] = np.flatnonzero(is_cyclic)
    for start in range(N):
        path = []
        v = start
        while tree_root[v] < 0:
            path.append(v)
            v = int(successor[v])
            if is_cyclic[v]:
                # 木の根は最初に到達した巡回元
                break
        root = int(tree_root[v]) if not is_cyclic[v] else v
        if path:
            tree_root[path] = root

    return BruteGraph(N=N, successor=successor, is_cyclic=is_cyclic, cycle_id=cycle_id, tree_root=tree_root)


def _two_adic(m: int) -> int:
    e = 0
    while m % 2 == 0:
        m //= 2
        e += 1
    return e


def _nonzero_idempotent(step: int, N: int) -> int:
    for e in range(step, N, step):
        if e * e % N == e:
            return e
    raise ValueError(f"{step} の倍数にべき等元がありません。")


def _kernel(step: int, exponent: int, N: int) -> FrozenSet[int]:
    unity = _nonzero_idempotent(step, N)
    return frozenset(x for x in range(step, N, step) if pow(x, 1 << exponent, N) == unity)


@lru_cache(maxsize=64)
def _literal_sets(s: int, p: int) -> Tuple[int, int, FrozenSet[int], FrozenSet[int]]:
    N = s * p
    k = _two_adic(s - 1)
    l = _two_adic(p - 1)
    return k, l, _kernel(s, l, N), _kernel(p, k, N)


def brute_classify(w: int, s: int, p: int) -> SubsetClass:
    """
    定義どおりに w の部分集合を判定する

    Args:
        w: 0 <= w < s*p
        s, p: 異なる奇素数
    """
    N = s * p
    k, l, s_kernel, p_kernel = _literal_sets(s, p)

    if w == 0:
        return SubsetClass.ZERO
    if w % s == 0:
        return SubsetClass.S_KERNEL if w in s_kernel else SubsetClass.S_FIELD_REST
    if w % p == 0:
        return SubsetClass.P_KERNEL if w in p_kernel else SubsetClass.P_FIELD_REST
    if pow(w, 1 << max(k, l), N) == 1:
        return SubsetClass.RING_KERNEL
    if any((w - e) % p == 0 for e in s_kernel):
        return SubsetClass.OFF_BY_ONE_P
    if any((w - e) % s == 0 for e in p_kernel):
        return SubsetClass.OFF_BY_ONE_S
    return SubsetClass.D_SET
