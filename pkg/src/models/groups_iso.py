"""
埋め込まれた体、オフバイワン群、準同型の全数検査

p𝔽_s^{+1} = {yp + 1}、p𝔽_s^{-1} = {yp - 1}、p𝔽_s^e = {yp + e | e ∈ s𝕂_p} とその s 側の対を扱う。
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple, Union

import numpy as np

from models.errors import PreconditionError, ZspError, ensure_budget
from models.partition import Side, embedded_field, field_kernel, in_field_kernel
from models.ring_core import CrtPair, RingContext, h_join, h_split, pair_add, pair_mul

logger = logging.getLogger(__name__)

# int64 の積が溢れない法の上限
_INT64_SAFE_MODULUS = 1 << 31
_TABLE_CHUNK = 1 << 22

Image = Union[int, CrtPair]


@dataclass(frozen=True)
class EmbeddingMap:
    """
    体の埋め込み

    kind="g" は 𝔽_s → p𝔽_s（multiplier = u_p）、kind="g1" は 𝔽_p → s𝔽_p（multiplier = u_s）。
    """
    kind: Literal["g", "g1"]
    multiplier: int

    def field_size(self, ctx: RingContext) -> int:
        return ctx.s if self.kind == "g" else ctx.p


def embedding_map(kind: Literal["g", "g1"], ctx: RingContext) -> EmbeddingMap:
    if kind == "g":
        return EmbeddingMap(kind="g", multiplier=ctx.u_p)
    if kind == "g1":
        return EmbeddingMap(kind="g1", multiplier=ctx.u_s)
    raise PreconditionError(f"埋め込みの種類が不正です: {kind}")


def embed(mapping: EmbeddingMap, x: int, ctx: RingContext) -> int:
    """
    体の元を ℤ_N に埋め込む

    Raises:
        PreconditionError: x が体の範囲外の場合
    """
    size = mapping.field_size(ctx)
    if not 0 <= x < size:
        raise PreconditionError(f"{x} は [0, {size}) の範囲外です。")
    return mapping.multiplier * x % ctx.N


class OffByOneVariant(str, Enum):
    """オフバイワン群の種類"""
    PLUS1_P = "plus1-p"
    PLUSMINUS1_P = "plusminus1-p"
    PLUS1_S = "plus1-s"
    PLUSMINUS1_S = "plusminus1-s"
    E_P = "e-p"
    E_S = "e-s"

    @property
    def side(self) -> Side:
        return "p" if self.value.endswith("-p") else "s"


@dataclass(frozen=True)
class OffByOneGroup:
    """オフバイワン群と、取り除いた零元"""
    variant: OffByOneVariant
    excluded: FrozenSet[int]


def _other(side: Side) -> Side:
    return "s" if side == "p" else "p"


def _side_primes(side: Side, ctx: RingContext) -> Tuple[int, int]:
    # (倍数をとる素数, 係数の法)。p 側の元は y*p ± 1 (y ∈ [0, s))
    return (ctx.p, ctx.s) if side == "p" else (ctx.s, ctx.p)


def offbyone_coset(side: Side, sign: Literal[1, -1], ctx: RingContext) -> List[int]:
    """
    p𝔽_s^{±1} の片側（sign=1 で {yp + 1}, sign=-1 で {yp - 1}）を昇順で返す

    p𝔽_s^{-1} 単独では乗法で閉じず、±1 群の半分としてだけ使う。
    """
    step, count = _side_primes(side, ctx)
    return sorted((y * step + sign) % ctx.N for y in range(count))


def offbyone_zero(variant: OffByOneVariant, ctx: RingContext) -> Union[int, FrozenSet[int]]:
    """
    オフバイワン群の乗法的零元

    Returns:
        plus1 系は単一の剰余（u_s または u_p）、plusminus1 系は 2 元の集合

    Raises:
        PreconditionError: e 系の場合（零元は核全体なので group.excluded を使う）
    """
    N = ctx.N
    beta_p = ctx.beta * ctx.p
    alpha_s = ctx.alpha * ctx.s
    if variant == OffByOneVariant.PLUS1_P:
        return (1 - beta_p) % N
    if variant == OffByOneVariant.PLUS1_S:
        return (alpha_s + 1) % N
    if variant == OffByOneVariant.PLUSMINUS1_P:
        return frozenset({(1 - beta_p) % N, (beta_p - 1) % N})
    if variant == OffByOneVariant.PLUSMINUS1_S:
        return frozenset({(alpha_s + 1) % N, (-alpha_s - 1) % N})
    raise PreconditionError(f"{variant.value} の零元は単一の剰余ではありません。")


def offbyone_group(variant: OffByOneVariant, ctx: RingContext) -> OffByOneGroup:
    if variant in (OffByOneVariant.E_P, OffByOneVariant.E_S):
        # yp = 0（s 側は xs = 0）の元、すなわち核そのものが零元
        excluded = frozenset(field_kernel(ctx, _other(variant.side)))
    else:
        zero = offbyone_zero(variant, ctx)
        excluded = zero if isinstance(zero, frozenset) else frozenset({zero})
    return OffByOneGroup(variant=variant, excluded=excluded)


def _raw_members(variant: OffByOneVariant, ctx: RingContext) -> List[int]:
    side = variant.side
    if variant in (OffByOneVariant.PLUS1_P, OffByOneVariant.PLUS1_S):
        return offbyone_coset(side, 1, ctx)
    if variant in (OffByOneVariant.PLUSMINUS1_P, OffByOneVariant.PLUSMINUS1_S):
        return sorted(set(offbyone_coset(side, 1, ctx)) | set(offbyone_coset(side, -1, ctx)))
    step, count = _side_primes(side, ctx)
    kernel = field_kernel(ctx, _other(side))
    return sorted({(y * step + e) % ctx.N for y in range(count) for e in kernel})


def enumerate_group(variant: OffByOneVariant, ctx: RingContext, budget: int, raw: bool = False) -> List[int]:
    """
    オフバイワン群の元を昇順で列挙する

    Args:
        variant: 群の種類
        ctx: コンテキスト
        budget: 要素数の上限
        raw: True なら零元を除く前の集合を返す

    Raises:
        BudgetExceededError: N が予算を超える場合
    """
    ensure_budget(ctx.N, budget)
    members = _raw_members(variant, ctx)
    if raw:
        return members
    excluded = offbyone_group(variant, ctx).excluded
    return [w for w in members if w not in excluded]


def _member_sign(w: int, variant: OffByOneVariant, ctx: RingContext) -> int:
    """w が属する片側の符号 (+1 / -1)。属さなければ 0"""
    step, _ = _side_primes(variant.side, ctx)
    residue = w % step
    if residue == 1:
        return 1
    if residue == step - 1 and variant in (OffByOneVariant.PLUSMINUS1_P, OffByOneVariant.PLUSMINUS1_S):
        return -1
    return 0


def _is_e_member(w: int, variant: OffByOneVariant, ctx: RingContext) -> bool:
    pair = h_split(w, ctx)
    if variant == OffByOneVariant.E_P:
        return in_field_kernel(pair.xs, ctx, "s")
    return in_field_kernel(pair.yp, ctx, "p")


def offbyone_inverse(w: int, variant: OffByOneVariant, ctx: RingContext) -> int:
    """
    オフバイワン群での逆元を閉じた合同式で求める

    Args:
        w: 群の元（零元は不可）
        variant: 群の種類
        ctx: コンテキスト

    Returns:
        w * v ≡ 1 (mod N) を満たす同じ群の元 v

    Raises:
        PreconditionError: w が群に属さない、または零元の場合
    """
    if not 0 <= w < ctx.N:
        raise PreconditionError(f"{w} は [0, {ctx.N}) の範囲外です。")
    group = offbyone_group(variant, ctx)
    if w in group.excluded:
        raise PreconditionError(f"{w} は {variant.value} の零元なので逆元を持ちません。")

    N = ctx.N
    if variant in (OffByOneVariant.E_P, OffByOneVariant.E_S):
        if not _is_e_member(w, variant, ctx):
            raise PreconditionError(f"{w} は {variant.value} に属しません。")
        pair = h_split(w, ctx)
        # 各成分を埋め込まれた体の単位元 u_s = -αs, u_p = βp に対して反転する
        x2 = (-ctx.alpha * pow(pair.xs, -1, ctx.p)) % ctx.p
        y2 = (ctx.beta * pow(pair.yp, -1, ctx.s)) % ctx.s
        inverse = h_join(CrtPair(xs=x2 * ctx.s, yp=y2 * ctx.p), ctx)
    else:
        sign = _member_sign(w, variant, ctx)
        if sign == 0:
            raise PreconditionError(f"{w} は {variant.value} に属しません。")
        step, modulus = _side_primes(variant.side, ctx)
        y = ((w - sign) // step) % modulus
        w_inv = pow(w, -1, modulus)
        # (yp+1)(y'p+1) ≡ 1 なら y' ≡ -y(yp+1)^{-1}、(yp-1)(y'p-1) ≡ 1 なら y' ≡ y(yp-1)^{-1}
        y2 = (-sign * y * w_inv) % modulus
        inverse = (y2 * step + sign) % N

    if inverse * w % N != 1 or inverse != pow(w, -1, N):
        raise ZspError(f"閉じた式による逆元 {inverse} が {w} の逆元と一致しません。")
    return inverse


def offbyone_to_field(w: int, side: Side, ctx: RingContext) -> int:
    """
    p𝔽_s^{+1,*} → p𝔽_s^* の同型 w ↦ u_p * w（side="s" なら u_s * w）

    Raises:
        PreconditionError: w が対応する plus1 群に属さない場合
    """
    variant = OffByOneVariant.PLUS1_P if side == "p" else OffByOneVariant.PLUS1_S
    step, _ = _side_primes(side, ctx)
    if not 0 <= w < ctx.N or w % step != 1 or w in offbyone_group(variant, ctx).excluded:
        raise PreconditionError(f"{w} は {variant.value} の群に属しません。")
    unity = ctx.u_p if side == "p" else ctx.u_s
    return unity * w % ctx.N


def kernel_field_product(ctx: RingContext, side: Side) -> List[CrtPair]:
    """
    h による p𝔽_s^e の像 s𝕂_p × p𝔽_s^*（side="s" なら s𝔽_p^* × p𝕂_s）
    """
    if side == "p":
        kernel = sorted(field_kernel(ctx, "s"))
        units = [y for y in embedded_field(ctx, "p") if y != 0]
        return [CrtPair(xs=e, yp=y) for e in kernel for y in units]
    kernel = sorted(field_kernel(ctx, "p"))
    units = [x for x in embedded_field(ctx, "s") if x != 0]
    return [CrtPair(xs=x, yp=e) for x in units for e in kernel]


@dataclass(frozen=True)
class GroupAxiomReport:
    closed: bool
    has_identity: bool
    all_invertible: bool
    closure_witness: Optional[Tuple[int, int]] = None
    inverse_witness: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.closed and self.has_identity and self.all_invertible

    @property
    def witnesses(self) -> Dict[str, object]:
        found: Dict[str, object] = {}
        if self.closure_witness is not None:
            found["closure"] = self.closure_witness
        if self.inverse_witness is not None:
            found["inverse"] = self.inverse_witness
        return found


def _as_array(values: Iterable[int], modulus: int) -> np.ndarray:
    dtype = np.int64 if modulus < _INT64_SAFE_MODULUS else object
    return np.array(sorted(values), dtype=dtype)


def check_group_axioms(members: Iterable[int], ctx: RingContext, unity: int = 1,
                       budget: Optional[int] = None) -> GroupAxiomReport:
    """
    乗法 mod N について群の公理を全数検査する

    埋め込まれた体のように単位元が 1 でない場合は unity で指定する（例: u_p）。
    失敗は例外ではなく反例として返す。

    Args:
        members: 検査する集合
        ctx: コンテキスト
        unity: 期待する単位元
        budget: |members|^2 の上限（None なら無制限）
    """
    arr = _as_array(set(members), ctx.N)
    if budget is not None:
        ensure_budget(len(arr) ** 2, budget)
    if len(arr) == 0:
        return GroupAxiomReport(closed=True, has_identity=False, all_invertible=True)

    lookup = None
    if arr.dtype != object:
        lookup = np.zeros(ctx.N, dtype=bool)
        lookup[arr] = True

    # 積の表は行のまとまりごとに作る
    closure_witness = None
    has_inverse = np.zeros(len(arr), dtype=bool)
    step = max(1, _TABLE_CHUNK // len(arr))
    for start in range(0, len(arr), step):
        rows = arr[start:start + step]
        table = (rows[:, None] * arr[None, :]) % ctx.N
        if closure_witness is None:
            inside = np.isin(table, arr) if lookup is None else lookup[table]
            if not inside.all():
                i, j = np.argwhere(~inside)[0]
                closure_witness = (int(rows[i]), int(arr[j]))
        has_inverse[start:start + step] = (table == unity).any(axis=1)
    closed = closure_witness is None

    has_identity = bool(np.any(arr == unity)) and bool(np.all(arr * unity % ctx.N == arr))

    all_invertible = bool(has_inverse.all())
    inverse_witness = None if all_invertible else int(arr[np.argmin(has_inverse)])

    report = GroupAxiomReport(
        closed=closed,
        has_identity=has_identity,
        all_invertible=all_invertible,
        closure_witness=closure_witness,
        inverse_witness=inverse_witness,
    )
    logger.debug("群の公理の検査: %d 元, %s", len(arr), report)
    return report


@dataclass(frozen=True)
class IsomorphismReport:
    injective: bool
    surjective: bool
    multiplicative: bool
    additive: Optional[bool] = None
    image_size: int = 0
    witnesses: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.injective and self.surjective and self.multiplicative and self.additive is not False


def _image_mul(a: Image, b: Image, ctx: RingContext) -> Image:
    if isinstance(a, CrtPair) and isinstance(b, CrtPair):
        return pair_mul(a, b, ctx)
    return a * b % ctx.N


def _image_add(a: Image, b: Image, ctx: RingContext) -> Image:
    if isinstance(a, CrtPair) and isinstance(b, CrtPair):
        return pair_add(a, b, ctx)
    return (a + b) % ctx.N


def check_isomorphism(mapping: Callable[[int], Image], domain: Iterable[int], ctx: RingContext, *,
                      domain_modulus: Optional[int] = None, codomain: Optional[Iterable[Image]] = None,
                      check_additive: bool = False, budget: Optional[int] = None) -> IsomorphismReport:
    """
    写像が像への全単射な乗法的準同型であるかを全数検査する

    Args:
        mapping: 検査する写像（像は剰余または CrtPair）
        domain: 定義域
        ctx: コンテキスト
        domain_modulus: 定義域での演算の法（既定は N。体 𝔽_s なら s）
        codomain: 期待する像。None なら像そのものへの全射とみなす
        check_additive: 加法も検査するか
        budget: |domain|^2 の上限

    Returns:
        IsomorphismReport（失敗は反例付きで返す）
    """
    points = sorted(set(domain))
    if budget is not None:
        ensure_budget(len(points) ** 2, budget)
    modulus = domain_modulus or ctx.N
    images = {x: mapping(x) for x in points}
    witnesses: Dict[str, object] = {}

    seen: Dict[Image, int] = {}
    injective = True
    for x, y in images.items():
        if y in seen:
            injective = False
            witnesses["injective"] = (seen[y], x)
            break
        seen[y] = x

    image_set = set(images.values())
    surjective = True
    if codomain is not None:
        target = set(codomain)
        missing = target - image_set
        surjective = not missing and image_set <= target
        if not surjective:
            witnesses["surjective"] = min(missing, key=str) if missing else min(image_set - target, key=str)

    multiplicative = True
    additive: Optional[bool] = True if check_additive else None
    for a, b in product(points, repeat=2):
        if multiplicative and mapping(a * b % modulus) != _image_mul(images[a], images[b], ctx):
            multiplicative = False
            witnesses["multiplicative"] = (a, b)
        if additive and mapping((a + b) % modulus) != _image_add(images[a], images[b], ctx):
            additive = False
            witnesses["additive"] = (a, b)
        if not multiplicative and additive is not True:
            break

    return IsomorphismReport(
        injective=injective,
        surjective=surjective,
        multiplicative=multiplicative,
        additive=additive,
        image_size=len(image_set),
        witnesses=witnesses,
    )


def check_crt_homomorphism(ctx: RingContext, budget: Optional[int] = None) -> IsomorphismReport:
    """
    h が ℤ_N 全体で全単射な環準同型であることを行ごとにベクトル化して検査する

    一度に持つのは長さ N の行だけなので、予算は N に対して確認する。

    Args:
        ctx: コンテキスト
        budget: N の上限
    """
    N = ctx.N
    if budget is not None:
        ensure_budget(N, budget)
    w = _as_array(range(N), N)
    xs = ctx.u_s * w % N
    yp = ctx.u_p * w % N
    witnesses: Dict[str, object] = {}

    components_ok = bool(np.all(xs % ctx.s == 0) and np.all(yp % ctx.p == 0))
    round_trip = (xs + yp) % N == w
    injective = components_ok and bool(round_trip.all())
    if not injective:
        witnesses["injective"] = int(w[np.argmin(round_trip)])
    # 成分の組が N 通りあり逆写像が存在すれば全射
    surjective = injective and len(set(zip(xs.tolist(), yp.tolist()))) == N

    multiplicative = True
    additive = True
    for a in range(N):
        prod_w = a * w % N
        sum_w = (a + w) % N
        mul_ok = (ctx.u_s * prod_w % N == xs[a] * xs % N) & (ctx.u_p * prod_w % N == yp[a] * yp % N)
        add_ok = (ctx.u_s * sum_w % N == (xs[a] + xs) % N) & (ctx.u_p * sum_w % N == (yp[a] + yp) % N)
        if multiplicative and not mul_ok.all():
            multiplicative = False
            witnesses["multiplicative"] = (a, int(w[np.argmin(mul_ok)]))
        if additive and not add_ok.all():
            additive = False
            witnesses["additive"] = (a, int(w[np.argmin(add_ok)]))
        if not (multiplicative or additive):
            break

    return IsomorphismReport(
        injective=injective,
        surjective=surjective,
        multiplicative=multiplicative,
        additive=additive,
        image_size=N,
        witnesses=witnesses,
    )
