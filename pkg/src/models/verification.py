"""
一つの素数の組に対して不変条件を全数検査する

各検査は CheckResult を返し、失敗は例外ではなく結果として集める。
最大巡回長の食い違いは参考情報で、失敗には数えない。
予算を超えて実行しなかった検査は SKIP として区別し、合格には数えない。
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Set, Tuple

import numpy as np

from models.errors import BudgetExceededError
from models.factor_demos import collision_factor, cyclic_attack, treelevel_pairs
from models.graph_dynamics import (
    RootedTree,
    arc_of,
    arc_tree_mul,
    build_graph,
    child_counts,
    combine_cycles,
    cycles_of,
    level_of,
    observed_max_dset_cycle,
    tree_of,
)
from models.groups_iso import (
    OffByOneVariant,
    check_crt_homomorphism,
    check_group_axioms,
    check_isomorphism,
    embed,
    embedding_map,
    enumerate_group,
    kernel_field_product,
    offbyone_group,
    offbyone_inverse,
    offbyone_to_field,
)
from models.oracle import brute_classify, brute_graph
from models.partition import (
    SubsetClass,
    cardinalities,
    class_counts,
    classify,
    embedded_field,
    enumerate_class,
    field_kernel,
    ring_kernel,
)
from models.ring_core import RingContext, cycle_length, h_split, is_cyclic, pow2iter, sqrt_mod_N

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False
    skipped: bool = False

    @property
    def status(self) -> str:
        """表示用の状態（INFO, SKIP, OK, NG）"""
        if self.informational:
            return "INFO"
        if self.skipped:
            return "SKIP"
        return "OK" if self.passed else "NG"


@dataclass(frozen=True)
class VerificationReport:
    s: int
    p: int
    checks: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        """実行した検査に失敗がないか（省略した検査は skipped で確認する）"""
        return not self.failures

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == "NG"]

    @property
    def skipped(self) -> List[CheckResult]:
        return [check for check in self.checks if check.skipped]

    @property
    def complete(self) -> bool:
        """すべての検査を最後まで実行したか"""
        return not self.skipped


def _ok(name: str, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=True, detail=detail)


def _fail(name: str, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=False, detail=detail)


def _skip(name: str, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=False, detail=detail, skipped=True)


def _over_budget(label: str, required: int, budget: int) -> str:
    return f"{label} ({required} > {budget})"


def _check_context(ctx: RingContext, budget: int) -> CheckResult:
    N = ctx.N
    problems = []
    if -ctx.alpha * ctx.s + ctx.beta * ctx.p != 1:
        problems.append("ベズーの等式")
    if (1 << ctx.k) * ctx.q != ctx.s - 1 or (1 << ctx.l) * ctx.r != ctx.p - 1:
        problems.append("s-1, p-1 の分解")
    if (ctx.u_s + ctx.u_p) % N != 1:
        problems.append("u_s + u_p ≡ 1")
    if h_split(1, ctx).xs != ctx.u_s or h_split(1, ctx).yp != ctx.u_p:
        problems.append("h(1) = (u_s, u_p)")
    return _fail("context", ", ".join(problems)) if problems else _ok("context")


def _check_idempotents(ctx: RingContext, budget: int) -> CheckResult:
    N = ctx.N
    g = embedding_map("g", ctx)
    g1 = embedding_map("g1", ctx)
    if (ctx.u_s * ctx.u_s - ctx.u_s) % N or (ctx.u_p * ctx.u_p - ctx.u_p) % N:
        return _fail("idempotents", "u_s または u_p がべき等ではありません")
    if embed(g, 1, ctx) != ctx.u_p or embed(g1, 1, ctx) != ctx.u_s:
        return _fail("idempotents", "埋め込みの単位元が一致しません")
    # 全列挙できる大きさの N では w * w は int64 に収まる
    w = np.arange(N, dtype=np.int64)
    found = sorted(int(x) for x in w[w * w % N == w])
    expected = sorted({0, 1, ctx.u_s, ctx.u_p})
    if found != expected:
        return _fail("idempotents", f"w^2 ≡ w の解 {found} != {expected}")
    return _ok("idempotents", f"解は {found} のみ")


def _check_sqrt(ctx: RingContext, budget: int) -> CheckResult:
    N = ctx.N
    roots: Dict[int, Set[int]] = defaultdict(set)
    for x in range(1, N):
        if math.gcd(x, N) == 1:
            roots[x * x % N].add(x)
    for a in range(1, N):
        if math.gcd(a, N) != 1:
            continue
        ours = sqrt_mod_N(a, ctx)
        if ours != roots.get(a, set()):
            return _fail("sqrt_mod_N", f"a={a}: {sorted(ours)} != {sorted(roots.get(a, set()))}")
        if ours and (len(ours) != 4 or {(N - r) % N for r in ours} != ours):
            return _fail("sqrt_mod_N", f"a={a} の平方根 {sorted(ours)} が 4 個の ± の組になりません")
    return _ok("sqrt_mod_N", f"{len(roots)} 個の平方剰余")


def _check_crt(ctx: RingContext, budget: int) -> CheckResult:
    report = check_crt_homomorphism(ctx, budget)
    if report.passed:
        return _ok("crt_homomorphism", f"{ctx.N} 行")
    return _fail("crt_homomorphism", f"反例: {report.witnesses}")


def _check_classify(ctx: RingContext, budget: int) -> CheckResult:
    for w in range(ctx.N):
        ours = classify(w, ctx)
        literal = brute_classify(w, ctx.s, ctx.p)
        if ours != literal:
            return _fail("classify_vs_oracle", f"w={w}: {ours.value} != {literal.value}")
    return _ok("classify_vs_oracle", f"{ctx.N} 元で一致")


def _check_cardinalities(ctx: RingContext, budget: int) -> CheckResult:
    report = cardinalities(ctx)
    counts = class_counts(ctx, budget)
    multiples = sum(counts[t] for t in (
        SubsetClass.ZERO, SubsetClass.S_KERNEL, SubsetClass.S_FIELD_REST,
        SubsetClass.P_KERNEL, SubsetClass.P_FIELD_REST,
    ))
    offbyone = counts[SubsetClass.OFF_BY_ONE_P] + counts[SubsetClass.OFF_BY_ONE_S] + counts[SubsetClass.RING_KERNEL]
    dset = enumerate_class(ctx, SubsetClass.D_SET, budget)
    dset_cyclic = sum(1 for w in dset if is_cyclic(w, ctx))
    expected = (report.n_multiples, report.n_offbyone, report.n_dset, report.n_kernel, report.n_dset_cyclic)
    observed = (multiples, offbyone, len(dset), counts[SubsetClass.RING_KERNEL], dset_cyclic)
    if expected != observed:
        return _fail("cardinalities", f"閉じた式 {expected} != 全数 {observed}")
    if sum(expected[:3]) != ctx.N:
        return _fail("cardinalities", "3 つの集合の和が N になりません")
    return _ok("cardinalities", f"{observed}")


def _check_cycles(ctx: RingContext, budget: int) -> CheckResult:
    ours = [cycle.nodes for cycle in build_graph(range(ctx.N), ctx, budget).cycles]
    literal = brute_graph(ctx.N, budget).cycles()
    if ours != literal:
        return _fail("cycles_vs_oracle", f"巡回の数 {len(ours)} / {len(literal)}")
    for nodes in ours:
        for w in nodes:
            pair = h_split(w, ctx)
            if not (is_cyclic(pair.xs, ctx) and is_cyclic(pair.yp, ctx)):
                return _fail("cycles_vs_oracle", f"巡回元 {w} の成分が巡回元ではありません")
    return _ok("cycles_vs_oracle", f"{len(ours)} 巡回で一致")


def _partial(name: str, checked: str, skipped: List[str]) -> CheckResult:
    if skipped:
        return _skip(name, f"{checked}。予算超過で省略: {', '.join(skipped)}")
    return _ok(name, checked)


def _check_groups(ctx: RingContext, budget: int) -> CheckResult:
    checked = 0
    skipped: List[str] = []
    for variant in OffByOneVariant:
        members = enumerate_group(variant, ctx, budget)
        excluded = offbyone_group(variant, ctx).excluded
        required = (len(members) + len(excluded)) ** 2
        if required > budget:
            skipped.append(_over_budget(variant.value, required, budget))
            continue
        report = check_group_axioms(members, ctx)
        if not report.passed:
            return _fail("group_axioms", f"{variant.value}: {report}")
        with_zeros = check_group_axioms(set(members) | excluded, ctx)
        if with_zeros.all_invertible or with_zeros.inverse_witness not in excluded:
            return _fail("group_axioms", f"{variant.value}: 零元を戻しても可逆性が崩れません")
        for w in members:
            # 閉じた式と一般の逆元が一致しなければ例外になる
            offbyone_inverse(w, variant, ctx)
        checked += 1
    kernel = ring_kernel(ctx)
    if not check_group_axioms(kernel, ctx).passed:
        return _fail("group_axioms", "𝕂_sp が群になりません")
    return _partial("group_axioms", f"{checked} 種類の群と 𝕂_sp", skipped)


def _check_isomorphisms(ctx: RingContext, budget: int) -> CheckResult:
    checked = 0
    skipped: List[str] = []
    for kind, modulus in (("g", ctx.s), ("g1", ctx.p)):
        mapping = embedding_map(kind, ctx)
        if modulus * modulus > budget:
            skipped.append(_over_budget(kind, modulus * modulus, budget))
            continue
        report = check_isomorphism(lambda x, m=mapping: embed(m, x, ctx), range(modulus), ctx,
                                   domain_modulus=modulus, check_additive=True)
        if not report.passed:
            return _fail("isomorphisms", f"{kind}: {report.witnesses}")
        checked += 1

    for side, variant in (("p", OffByOneVariant.PLUS1_P), ("s", OffByOneVariant.PLUS1_S)):
        members = enumerate_group(variant, ctx, budget)
        if len(members) ** 2 > budget:
            skipped.append(_over_budget(f"{variant.value} → 体", len(members) ** 2, budget))
            continue
        target = [w for w in embedded_field(ctx, side) if w != 0]
        report = check_isomorphism(lambda w, sd=side: offbyone_to_field(w, sd, ctx), members, ctx, codomain=target)
        if not report.passed:
            return _fail("isomorphisms", f"{variant.value} → 体: {report.witnesses}")
        checked += 1

    for side, variant in (("p", OffByOneVariant.E_P), ("s", OffByOneVariant.E_S)):
        members = enumerate_group(variant, ctx, budget)
        if len(members) ** 2 > budget:
            skipped.append(_over_budget(f"{variant.value} → 核と体の積", len(members) ** 2, budget))
            continue
        report = check_isomorphism(lambda w: h_split(w, ctx), members, ctx, codomain=kernel_field_product(ctx, side))
        if not report.passed:
            return _fail("isomorphisms", f"{variant.value} → 核と体の積: {report.witnesses}")
        checked += 1
    return _partial("isomorphisms", f"{checked} 個の同型", skipped)


def _check_cycle_correspondence(ctx: RingContext, budget: int) -> CheckResult:
    s_cycles = cycles_of(embedded_field(ctx, "s"), ctx, budget)
    p_cycles = cycles_of(embedded_field(ctx, "p"), ctx, budget)
    combined = []
    for cs in s_cycles:
        for cp in p_cycles:
            produced = combine_cycles(cs, cp, ctx)
            if len(produced) != math.gcd(cs.length, cp.length):
                return _fail("cycle_correspondence", f"{cs.nodes} と {cp.nodes} から {len(produced)} 個の巡回")
            if any(c.length != math.lcm(cs.length, cp.length) for c in produced):
                return _fail("cycle_correspondence", f"{cs.nodes} と {cp.nodes} の巡回長が lcm ではありません")
            combined.extend(c.nodes for c in produced)
    literal = brute_graph(ctx.N, budget).cycles()
    if sorted(combined) != sorted(literal):
        return _fail("cycle_correspondence", f"組み立てた巡回 {len(combined)} 個 / 全数 {len(literal)} 個")
    return _ok("cycle_correspondence", f"{len(s_cycles)} x {len(p_cycles)} 組から {len(combined)} 巡回")


def _component_trees(ctx: RingContext) -> Tuple[RootedTree, RootedTree]:
    s_tree = build_graph(field_kernel(ctx, "s"), ctx).tree(ctx.u_s)
    p_tree = build_graph(field_kernel(ctx, "p"), ctx).tree(ctx.u_p)
    return s_tree, p_tree


def _check_level_rule(ctx: RingContext, budget: int) -> CheckResult:
    tree = tree_of(1, ctx.n, ctx)
    s_tree, p_tree = _component_trees(ctx)
    for w in sorted(tree.nodes):
        pair = h_split(w, ctx)
        expected = max(level_of(pair.xs, s_tree), level_of(pair.yp, p_tree))
        if level_of(w, tree) != expected:
            return _fail("level_rule", f"w={w}: レベル {level_of(w, tree)} != 成分のレベルの最大 {expected}")
    return _ok("level_rule", f"{tree.size} 節点")


def _check_kernel_tree_shape(ctx: RingContext, budget: int) -> CheckResult:
    tree = tree_of(1, ctx.n, ctx)
    if tree.size != 1 << (ctx.k + ctx.l) or tree.height != max(ctx.k, ctx.l):
        return _fail("kernel_tree_shape", f"節点 {tree.size}, 高さ {tree.height}")
    s_tree, p_tree = _component_trees(ctx)
    s_children, p_children = child_counts(s_tree), child_counts(p_tree)
    for w, count in child_counts(tree).items():
        pair = h_split(w, ctx)
        # 成分の平方根の数。根は自分自身も平方根に持つ
        s_branch = s_children[pair.xs] + (pair.xs == ctx.u_s)
        p_branch = p_children[pair.yp] + (pair.yp == ctx.u_p)
        expected = s_branch * p_branch - (w == 1)
        if count != expected:
            return _fail("kernel_tree_shape", f"w={w}: 子の数 {count} != {s_branch} x {p_branch}")
    return _ok("kernel_tree_shape", f"{tree.size} 節点, 高さ {tree.height}")


def _check_arc_tree(ctx: RingContext, budget: int) -> CheckResult:
    kernel_tree = tree_of(1, ctx.n, ctx)
    checked = 0
    for a in range(1, ctx.N):
        if math.gcd(a, ctx.N) != 1 or not is_cyclic(a, ctx):
            continue
        product = arc_tree_mul(arc_of(a, ctx.n, ctx), kernel_tree, ctx)
        direct = tree_of(a, ctx.n, ctx)
        if product.levels != direct.levels or product.parent != direct.parent:
            return _fail("arc_tree", f"a={a} の木が一致しません")
        checked += 1
    return _ok("arc_tree", f"{checked} 個の巡回元")


def _check_dset_distance(ctx: RingContext, budget: int) -> CheckResult:
    forbidden_s = {0, 1, ctx.s - 1}
    forbidden_p = {0, 1, ctx.p - 1}
    for w in enumerate_class(ctx, SubsetClass.D_SET, budget):
        x = w
        # 巡回に入るまで高々 n 回、その後は一周すれば十分
        steps = 2 * ctx.n + cycle_length(pow2iter(w, ctx.n, ctx), ctx)
        for _ in range(steps + 1):
            if x % ctx.s in forbidden_s or x % ctx.p in forbidden_p:
                return _fail("dset_distance", f"w={w} の反復 {x} が s または p の倍数 ±1 に近すぎます")
            x = x * x % ctx.N
    return _ok("dset_distance")


def _check_treelevel_pairs(ctx: RingContext, budget: int) -> CheckResult:
    checked = 0
    for a in range(1, ctx.N):
        if math.gcd(a, ctx.N) != 1 or not is_cyclic(a, ctx):
            continue
        pairs = treelevel_pairs(a, ctx)
        if len(pairs) != 2:
            return _fail("treelevel_pairs", f"a={a} の組が {len(pairs)} 個です")
        for x, y in pairs:
            if not collision_factor(ctx.N, x, y).found:
                return _fail("treelevel_pairs", f"a={a}: 組 ({x}, {y}) で因数が得られません")
        checked += 1
    return _ok("treelevel_pairs", f"{checked} 個の巡回元")


def _check_cyclic_attack(ctx: RingContext, budget: int) -> CheckResult:
    attempted = 0
    for w in enumerate_class(ctx, SubsetClass.D_SET, budget):
        root = pow2iter(w, ctx.n, ctx)
        orbit = [root]
        for _ in range(cycle_length(root, ctx) - 1):
            orbit.append(orbit[-1] * orbit[-1] % ctx.N)
        mu = next(d for d in range(1, len(orbit) + 1) if orbit[d % len(orbit)] % ctx.s == root % ctx.s)
        nu = next(d for d in range(1, len(orbit) + 1) if orbit[d % len(orbit)] % ctx.p == root % ctx.p)
        if mu == nu:
            continue
        result = cyclic_attack(ctx.N, w, 4 * math.lcm(mu, nu))
        if not result.found:
            return _fail("cyclic_attack", f"w={w} (μ={mu}, ν={nu}) で因数が見つかりません")
        attempted += 1
    return _ok("cyclic_attack", f"{attempted} 個の開始値")


def _check_max_cycle(ctx: RingContext, budget: int) -> CheckResult:
    report = cardinalities(ctx).with_observed(observed_max_dset_cycle(ctx, budget))
    detail = f"主張 lcm(q--, r--) = {report.claimed_max_cycle}, 観測 {report.observed_max_cycle}"
    if report.max_cycle_mismatch:
        detail += "（食い違い）"
    return CheckResult(name="max_cycle", passed=not report.max_cycle_mismatch, detail=detail, informational=True)


CHECKS: Tuple[Tuple[str, Callable[[RingContext, int], CheckResult]], ...] = (
    ("context", _check_context),
    ("idempotents", _check_idempotents),
    ("sqrt_mod_N", _check_sqrt),
    ("crt_homomorphism", _check_crt),
    ("classify_vs_oracle", _check_classify),
    ("cardinalities", _check_cardinalities),
    ("cycles_vs_oracle", _check_cycles),
    ("cycle_correspondence", _check_cycle_correspondence),
    ("group_axioms", _check_groups),
    ("isomorphisms", _check_isomorphisms),
    ("level_rule", _check_level_rule),
    ("kernel_tree_shape", _check_kernel_tree_shape),
    ("arc_tree", _check_arc_tree),
    ("dset_distance", _check_dset_distance),
    ("treelevel_pairs", _check_treelevel_pairs),
    ("cyclic_attack", _check_cyclic_attack),
    ("max_cycle", _check_max_cycle),
)


def run_verification(ctx: RingContext, budget: int) -> VerificationReport:
    """
    すべての検査を実行する

    Args:
        ctx: コンテキスト
        budget: 全列挙の要素数の上限（二乗の大きさの検査はこれを超えると SKIP になる）

    Raises:
        BudgetExceededError: N そのものが予算を超える場合
    """
    if ctx.N > budget:
        raise BudgetExceededError(ctx.N, budget)
    results = []
    for name, check in CHECKS:
        result = check(ctx, budget)
        logger.info("%s: %s %s", name, result.status, result.detail)
        results.append(result)
    return VerificationReport(s=ctx.s, p=ctx.p, checks=tuple(results))
