"""
ℤ_sp の基本演算を扱うモジュール

素数の組 (s, p) ごとの定数、平方写像、CRT 同型 h、素数および N を法とする平方根を提供する。
剰余はすべて [0, N) の正規代表元で扱う。
"""
from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Literal

from sympy import isprime

from models.errors import InvalidModulusError, NotCyclicError, PreconditionError

# 2 つの剰余の積が 128 ビットに収まる上限
MAX_MODULUS = 1 << 62

# 全探索による平方根計算を許す法の上限
SCAN_LIMIT = 1 << 16


def factor_pow2(m: int) -> tuple[int, int]:
    """
    m - 1 = 2^e * odd と分解する

    Args:
        m: 2 以上の整数（通常は素数 s, p）

    Returns:
        (e, odd): 2 の指数と奇数部分
    """
    if m < 2:
        raise InvalidModulusError(f"m は 2 以上である必要があります: {m}")
    odd = m - 1
    e = 0
    while odd % 2 == 0:
        odd //= 2
        e += 1
    return e, odd


@dataclass(frozen=True)
class RingContext:
    """
    素数の組 (s, p) に対する定数一式

    -alpha*s + beta*p = 1 を満たし、u_s = -alpha*s mod N と u_p = beta*p mod N は
    ℤ_N の非自明なべき等元（平方写像の固定点）である。
    """
    s: int
    p: int
    N: int
    k: int
    q: int
    l: int
    r: int
    alpha: int
    beta: int
    u_s: int
    u_p: int
    n: int


@dataclass(frozen=True)
class CrtPair:
    """
    h(w) = (xs, yp)

    xs は s の倍数、yp は p の倍数で、(xs + yp) mod N が元の要素になる。
    """
    xs: int
    yp: int


def build_context(s: int, p: int) -> RingContext:
    """
    素数の組から RingContext を構成する

    Args:
        s: 奇素数
        p: s と異なる奇素数

    Returns:
        RingContext: 不変条件をすべて満たすコンテキスト

    Raises:
        InvalidModulusError: 素数でない、s = p、偶素数、N が 2^62 以上の場合
    """
    for name, value in (("s", s), ("p", p)):
        if value < 3 or not isprime(value):
            raise InvalidModulusError(f"{name}={value} は奇素数ではありません。")
    if s == p:
        raise InvalidModulusError(f"s と p は異なる素数である必要があります: {s}")
    N = s * p
    if N >= MAX_MODULUS:
        raise InvalidModulusError(f"N = {N} が上限 2^62 を超えています。")

    k, q = factor_pow2(s)
    l, r = factor_pow2(p)

    # -alpha ≡ s^{-1} (mod p)、0 < alpha < p の範囲で一意
    alpha = (-pow(s, -1, p)) % p
    beta, rem = divmod(1 + alpha * s, p)
    if rem != 0 or -alpha * s + beta * p != 1 or not (0 < beta < s):
        raise InvalidModulusError(f"ベズー係数の計算に失敗しました: s={s}, p={p}")

    return RingContext(
        s=s,
        p=p,
        N=N,
        k=k,
        q=q,
        l=l,
        r=r,
        alpha=alpha,
        beta=beta,
        u_s=(-alpha * s) % N,
        u_p=(beta * p) % N,
        n=max(k, l),
    )


def _check_residue(w: int, ctx: RingContext) -> None:
    if not 0 <= w < ctx.N:
        raise InvalidModulusError(f"{w} は [0, {ctx.N}) の範囲外です。")


def fsquare(w: int, ctx: RingContext) -> int:
    """平方写像 f(w) = w^2 mod N"""
    return w * w % ctx.N


def pow2iter(w: int, i: int, ctx: RingContext) -> int:
    """
    平方写像を i 回適用する

    Args:
        w: 剰余
        i: 反復回数（0 以上）
        ctx: コンテキスト

    Returns:
        w^(2^i) mod N
    """
    if i < 0:
        raise PreconditionError(f"反復回数は 0 以上である必要があります: {i}")
    N = ctx.N
    for _ in range(i):
        w = w * w % N
    return w


def h_split(w: int, ctx: RingContext) -> CrtPair:
    """
    CRT 同型 h による分解

    Args:
        w: [0, N) の剰余
        ctx: コンテキスト

    Returns:
        CrtPair: (u_s*w mod N, u_p*w mod N)
    """
    _check_residue(w, ctx)
    return CrtPair(xs=ctx.u_s * w % ctx.N, yp=ctx.u_p * w % ctx.N)


def h_join(pair: CrtPair, ctx: RingContext) -> int:
    """
    h の逆写像。s の倍数と p の倍数の和として元を復元する

    Raises:
        PreconditionError: 成分がそれぞれの素数で割り切れない場合
    """
    _check_residue(pair.xs, ctx)
    _check_residue(pair.yp, ctx)
    if pair.xs % ctx.s != 0:
        raise PreconditionError(f"xs={pair.xs} は s={ctx.s} の倍数ではありません。")
    if pair.yp % ctx.p != 0:
        raise PreconditionError(f"yp={pair.yp} は p={ctx.p} の倍数ではありません。")
    return (pair.xs + pair.yp) % ctx.N


def pair_add(a: CrtPair, b: CrtPair, ctx: RingContext) -> CrtPair:
    """直積環 s𝔽_p × p𝔽_s の加法"""
    return CrtPair(xs=(a.xs + b.xs) % ctx.N, yp=(a.yp + b.yp) % ctx.N)


def pair_mul(a: CrtPair, b: CrtPair, ctx: RingContext) -> CrtPair:
    """直積環 s𝔽_p × p𝔽_s の乗法"""
    return CrtPair(xs=a.xs * b.xs % ctx.N, yp=a.yp * b.yp % ctx.N)


def pair_unity(ctx: RingContext) -> CrtPair:
    """直積環の単位元 (u_s, u_p)"""
    return CrtPair(xs=ctx.u_s, yp=ctx.u_p)


def pair_inverse(a: CrtPair, ctx: RingContext) -> CrtPair:
    """
    直積環での逆元

    各成分は埋め込まれた体の中で反転する（単位元は u_s, u_p）。

    Raises:
        PreconditionError: いずれかの成分が 0 の場合
    """
    if a.xs == 0 or a.yp == 0:
        raise PreconditionError(f"成分が 0 の元 ({a.xs}, {a.yp}) は逆元を持ちません。")
    # xs = x*s のとき逆元は u_s * (x*s)^{-1} (mod p) に対応する
    x_inv = pow(a.xs, -1, ctx.p)
    y_inv = pow(a.yp, -1, ctx.s)
    return CrtPair(xs=ctx.u_s * x_inv % ctx.N, yp=ctx.u_p * y_inv % ctx.N)


def _sqrt_scan(a: int, m: int) -> FrozenSet[int]:
    if m >= SCAN_LIMIT:
        raise InvalidModulusError(f"全探索は m < 2^16 のみ対応しています: {m}")
    return frozenset(x for x in range(m) if x * x % m == a)


def _tonelli_shanks(a: int, m: int) -> FrozenSet[int]:
    if a == 0:
        return frozenset({0})
    # オイラーの規準
    if pow(a, (m - 1) // 2, m) != 1:
        return frozenset()

    e, odd = factor_pow2(m)
    if e == 1:
        x = pow(a, (m + 1) // 4, m)
        return frozenset({x, m - x})

    # 最初の平方非剰余を決定的に探す
    z = 2
    while pow(z, (m - 1) // 2, m) != m - 1:
        z += 1

    c = pow(z, odd, m)
    x = pow(a, (odd + 1) // 2, m)
    t = pow(a, odd, m)
    e_cur = e
    while t != 1:
        i = 1
        t2 = t * t % m
        while t2 != 1:
            t2 = t2 * t2 % m
            i += 1
        b = pow(c, 1 << (e_cur - i - 1), m)
        x = x * b % m
        c = b * b % m
        t = t * c % m
        e_cur = i
    return frozenset({x, m - x})


def sqrt_mod_prime(a: int, m: int, method: Literal["tonelli", "scan"] = "tonelli") -> FrozenSet[int]:
    """
    奇素数 m を法とする平方根をすべて求める

    Args:
        a: 0 <= a < m
        m: 奇素数
        method: "tonelli"（Tonelli–Shanks）または "scan"（m < 2^16 の全探索）

    Returns:
        平方根の集合（0, 1, 2 要素）。平方非剰余なら空集合
    """
    if not 0 <= a < m:
        raise InvalidModulusError(f"{a} は [0, {m}) の範囲外です。")
    if method == "scan":
        return _sqrt_scan(a, m)
    return _tonelli_shanks(a, m)


def sqrt_mod_N(a: int, ctx: RingContext) -> FrozenSet[int]:
    """
    N を法とする平方根をすべて求める

    s と p それぞれの平方根を CRT で組み合わせる。
    N と互いに素な a では根の個数は 0 または 4 になる。
    """
    _check_residue(a, ctx)
    roots_s = sqrt_mod_prime(a % ctx.s, ctx.s)
    roots_p = sqrt_mod_prime(a % ctx.p, ctx.p)
    # u_p ≡ 1 (mod s), u_s ≡ 1 (mod p)
    return frozenset((rs * ctx.u_p + rp * ctx.u_s) % ctx.N for rs, rp in product(roots_s, roots_p))


def is_cyclic(w: int, ctx: RingContext) -> bool:
    """
    w が平方写像の周期点かどうか

    各 CRT 成分が 0 であるか、奇数位数（x^q ≡ 1 mod s, x^r ≡ 1 mod p）であれば巡回元。
    """
    _check_residue(w, ctx)
    ws, wp = w % ctx.s, w % ctx.p
    s_ok = ws == 0 or pow(ws, ctx.q, ctx.s) == 1
    p_ok = wp == 0 or pow(wp, ctx.r, ctx.p) == 1
    return s_ok and p_ok


def cycle_length(w: int, ctx: RingContext) -> int:
    """
    w^(2^θ) = w となる最小の θ >= 1

    Raises:
        NotCyclicError: w が巡回元でない場合
    """
    if not is_cyclic(w, ctx):
        raise NotCyclicError(f"{w} は巡回元ではありません。")
    x = fsquare(w, ctx)
    theta = 1
    while x != w:
        x = fsquare(x, ctx)
        theta += 1
    return theta
