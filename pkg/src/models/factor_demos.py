"""
𝔻_sp に関わる 2 種類の因数分解の小規模デモ

cyclic_attack は N だけを知る攻撃者として平方写像の周期の違いを使う。
treelevel_pairs は s, p を知った上で木のレベル 1 の平方根の組を列挙する。
"""
import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import gmpy2

from models.errors import NotCyclicError, PreconditionError, ZspError
from models.ring_core import RingContext, is_cyclic, sqrt_mod_N

logger = logging.getLogger(__name__)

# gcd をまとめて取る間隔
GCD_BATCH = 8


@dataclass(frozen=True)
class FactorResult:
    factor: Optional[int]
    iterations: int
    method: Literal["cyclic", "collision"]

    @property
    def found(self) -> bool:
        return self.factor is not None


def _result(N: int, factor: Optional[int], iterations: int, method: Literal["cyclic", "collision"]) -> FactorResult:
    if factor is not None and not (1 < factor < N and N % factor == 0):
        raise ZspError(f"{factor} は N = {N} の非自明な約数ではありません。")
    return FactorResult(factor=factor, iterations=iterations, method=method)


def _check_modulus(N: int) -> None:
    if N < 9 or N % 2 == 0 or gmpy2.is_prime(N):
        raise PreconditionError(f"N = {N} は奇数の合成数ではありません。")


def cyclic_attack(N: int, w: int, max_iter: int) -> FactorResult:
    """
    平方写像の軌道 w^(2^i) で周期を探し、gcd で N を分解する

    Brent 流に窓の長さを 2 倍ずつ伸ばし、窓の先頭 y と現在値 x の差を GCD_BATCH 回分まとめて gcd を取る。
    まとめた gcd が N になったときは各差を取り直す。

    Args:
        N: 奇数の合成数（素因数は使わない）
        w: 1 < w < N の開始値
        max_iter: 平方の回数の上限

    Returns:
        FactorResult: 見つからなければ factor は None
    """
    _check_modulus(N)
    if not 1 < w < N:
        raise PreconditionError(f"開始値 {w} は (1, {N}) の範囲外です。")

    g = int(gmpy2.gcd(w, N))
    if g != 1:
        logger.info("開始値 %d は N と互いに素ではありません: gcd = %d", w, g)
        return _result(N, g, 0, "cyclic")

    x = y = gmpy2.mpz(w)
    power = lam = 1
    product = gmpy2.mpz(1)
    pending: List[Tuple[int, int]] = []

    for i in range(1, max_iter + 1):
        if power == lam:
            y = x
            power *= 2
            lam = 0
        x = gmpy2.powmod(x, 2, N)
        lam += 1

        diff = (x - y) % N
        pending.append((i, int(diff)))
        product = product * diff % N
        if len(pending) < GCD_BATCH and i < max_iter:
            continue

        if gmpy2.gcd(product, N) != 1:
            # 最初に因数を与えた反復を特定する（差が 0 のものは両側の周期が揃っている）
            for j, d in pending:
                g = int(gmpy2.gcd(d, N))
                if 1 < g < N:
                    logger.info("反復 %d で因数 %d を発見しました。", j, g)
                    return _result(N, g, j, "cyclic")
        pending.clear()
        product = gmpy2.mpz(1)

    logger.info("%d 回の平方で因数は見つかりませんでした。", max_iter)
    return _result(N, None, max_iter, "cyclic")


def collision_factor(N: int, x: int, y: int) -> FactorResult:
    """
    x^2 ≡ y^2 (mod N) の組から gcd(y - x, N)、次に gcd(y + x, N) を試す

    Raises:
        PreconditionError: x^2 ≢ y^2 (mod N) の場合
    """
    if x * x % N != y * y % N:
        raise PreconditionError(f"{x}^2 と {y}^2 は N = {N} を法として一致しません。")
    for attempt, candidate in enumerate((y - x, y + x), start=1):
        g = int(gmpy2.gcd(candidate % N, N))
        if 1 < g < N:
            return _result(N, g, attempt, "collision")
    return _result(N, None, 2, "collision")


def treelevel_pairs(a: int, ctx: RingContext) -> List[Tuple[int, int]]:
    """
    a を根とする木のレベル 1 にある平方根から、因数を与える組を列挙する

    s, p を使って平方根を求める。最小の根 x0 と、x0 とも -x0 とも異なる根 y の組 (x0, y) を返す。

    Raises:
        NotCyclicError: a が巡回元でない場合
        PreconditionError: a が N と互いに素でない、または平方根を持たない場合
    """
    if not is_cyclic(a, ctx):
        raise NotCyclicError(f"{a} は巡回元ではありません。")
    if gmpy2.gcd(a, ctx.N) != 1:
        raise PreconditionError(f"{a} は N と互いに素ではないため使える平方根がありません。")
    roots = sorted(sqrt_mod_N(a, ctx))
    if len(roots) < 2:
        raise PreconditionError(f"{a} には使える平方根がありません。")
    x0 = roots[0]
    return [(x0, y) for y in roots if y not in (x0, ctx.N - x0)]
