"""
素数の組ごとの解析をまとめるモジュール
"""
import logging
import os
from dataclasses import asdict
from datetime import datetime
from functools import cached_property
from typing import Any, Callable, Dict, Iterable, List, Optional

from models.errors import PreconditionError, ensure_budget
from models.graph_dynamics import (
    CycleRecord,
    FunctionalGraph,
    build_graph,
    cycle_histogram,
    cycles_of,
    observed_max_dset_cycle,
    tree_of,
)
from models.partition import (
    CardinalityReport,
    SubsetClass,
    cardinalities,
    class_counts,
    classify,
    embedded_field,
    enumerate_class,
    ring_kernel,
)
from models.ring_core import RingContext, h_split, pow2iter
from utils.config import DEFAULT_BUDGET, DEFAULT_WORKERS
from utils.exporters import SCHEMA_VERSION, edge_rows, to_csv, to_dot, to_json
from utils.html_generator import generate_report_html

logger = logging.getLogger(__name__)

KERNEL_TREE_FIELDS = ["value", "level", "xs", "xs_level", "yp", "yp_level"]
CYCLE_FIELDS = ["nodes", "length", "mu", "nu", "s_laps", "p_laps"]
EDGE_FIELDS = ["w", "successor", "class", "cyclic"]


class RingAnalyzer:
    """
    一つの ℤ_sp について分割・グラフ・エクスポートをまとめて扱うクラス
    """

    def __init__(self, ctx: RingContext, budget: int = DEFAULT_BUDGET, workers: int = DEFAULT_WORKERS):
        """
        RingAnalyzerの初期化

        Args:
            ctx: コンテキスト
            budget: 全列挙の要素数の上限
            workers: 分類を並列に行うプロセス数
        """
        self.ctx = ctx
        self.budget = budget
        self.workers = workers

        # 巡回を調べられる定義域（いずれも平方写像で閉じている）
        self.available_domains: Dict[str, Callable[[], Iterable[int]]] = {
            "ring": lambda: range(self.ctx.N),
            "units": self._units,
            "dset": lambda: enumerate_class(self.ctx, SubsetClass.D_SET, self.budget, self.workers),
            "s-field": lambda: embedded_field(self.ctx, "s"),
            "p-field": lambda: embedded_field(self.ctx, "p"),
            "kernel": lambda: ring_kernel(self.ctx),
        }

    def _units(self) -> List[int]:
        return [w for w in range(self.ctx.N) if w % self.ctx.s and w % self.ctx.p]

    @cached_property
    def graph(self) -> FunctionalGraph:
        """ℤ_N 全体の関数グラフ"""
        ensure_budget(self.ctx.N, self.budget)
        logger.info("N=%d の関数グラフを構成します", self.ctx.N)
        return build_graph(range(self.ctx.N), self.ctx, self.budget)

    def domain(self, name: str) -> List[int]:
        if name not in self.available_domains:
            raise PreconditionError(f"定義域 '{name}' は利用できません。利用可能な定義域: {', '.join(self.available_domains)}")
        return sorted(self.available_domains[name]())

    def context_dict(self) -> Dict[str, int]:
        return asdict(self.ctx)

    def cardinality_report(self) -> CardinalityReport:
        """観測した最大巡回長を埋めた CardinalityReport"""
        return cardinalities(self.ctx).with_observed(observed_max_dset_cycle(self.ctx, self.budget, self.workers))

    def summary(self) -> Dict[str, Any]:
        """
        コンテキスト、各集合の大きさ、巡回長のヒストグラムをまとめる

        Returns:
            analyze コマンドで出力する辞書
        """
        report = self.cardinality_report()
        return {
            "context": self.context_dict(),
            "cardinalities": {**asdict(report), "max_cycle_mismatch": report.max_cycle_mismatch},
            "cycle_histogram": cycle_histogram(self.graph.cycles),
        }

    def partition_counts(self) -> Dict[str, int]:
        counts = class_counts(self.ctx, self.budget, self.workers)
        return {tag.value: counts[tag] for tag in SubsetClass}

    def kernel_tree_rows(self) -> List[Dict[str, int]]:
        """
        𝒯_n(1) の各節点とその成分のレベル

        成分のレベルは埋め込まれた体の単位元に達するまでの平方の回数。
        """
        ctx = self.ctx
        tree = tree_of(1, ctx.n, ctx)
        rows = []
        for level, nodes in enumerate(tree.levels):
            for w in nodes:
                pair = h_split(w, ctx)
                rows.append({
                    "value": w,
                    "level": level,
                    "xs": pair.xs,
                    "xs_level": _unity_distance(pair.xs, ctx.u_s, ctx),
                    "yp": pair.yp,
                    "yp_level": _unity_distance(pair.yp, ctx.u_p, ctx),
                })
        return rows

    def cycle_rows(self, domain: str = "ring") -> List[Dict[str, Any]]:
        """指定した定義域の巡回と μ, ν, 周回数"""
        cycles = cycles_of(self.domain(domain), self.ctx, self.budget)
        return [_cycle_row(cycle) for cycle in cycles]

    def export_document(self) -> Dict[str, Any]:
        """
        スキーマ "1" のエクスポート文書を作る

        Returns:
            JSON にそのまま書き出せる辞書（順序は決定的）
        """
        graph = self.graph
        report = self.cardinality_report()
        trees = [graph.tree(root) for root in graph.tree_roots]
        return {
            "schema_version": SCHEMA_VERSION,
            "s": self.ctx.s,
            "p": self.ctx.p,
            "context": self.context_dict(),
            "partition": self.partition_counts(),
            "cardinalities": {**asdict(report), "max_cycle_mismatch": report.max_cycle_mismatch},
            "cycles": [
                {
                    "nodes": list(cycle.nodes),
                    "mu": cycle.s_period,
                    "nu": cycle.p_period,
                    "laps": {"s": cycle.s_laps, "p": cycle.p_laps},
                }
                for cycle in graph.cycles
            ],
            "trees": [{"root": tree.root, "levels": [list(level) for level in tree.levels]} for tree in trees],
            "classes": {str(w): classify(w, self.ctx).value for w in range(self.ctx.N)},
            "edges": [[w, image] for w, image in graph.edges()],
        }

    def render(self, document: Dict[str, Any], fmt: str) -> str:
        """文書を指定した形式の文字列にする"""
        if fmt == "json":
            return to_json(document)
        if fmt == "dot":
            return to_dot(document)
        if fmt == "csv":
            return to_csv(edge_rows(document), EDGE_FIELDS)
        if fmt == "html":
            return generate_report_html(document, title=f"ℤ_{self.ctx.N} (s={self.ctx.s}, p={self.ctx.p}) の平方写像")
        raise PreconditionError(f"形式 '{fmt}' は利用できません。")

    def save_export(self, document: Dict[str, Any], fmt: str = "json", filename: Optional[str] = None) -> str:
        """
        エクスポート文書をファイルに保存する

        Args:
            document: export_document() の戻り値
            fmt: dot, json, csv, html のいずれか
            filename: 保存するファイル名（指定しない場合は現在の日時を使用）

        Returns:
            保存したファイルのパス
        """
        if not filename:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"exports/zsp_{self.ctx.s}_{self.ctx.p}_{timestamp}.{fmt}"

        # ディレクトリが存在しない場合は作成
        directory = os.path.dirname(filename)
        if directory:
            os.makedirs(directory, exist_ok=True)

        with open(filename, "w", encoding="utf-8") as f:
            f.write(self.render(document, fmt))

        logger.info("エクスポートを保存しました: %s", filename)
        return filename

    def generate_html(self, document: Dict[str, Any], filename: Optional[str] = None) -> str:
        """エクスポート文書をHTMLファイルに変換する"""
        return self.save_export(document, "html", filename)


def _unity_distance(component: int, unity: int, ctx: RingContext) -> int:
    # 核の元なので高々 n 回で単位元に達する
    for i in range(ctx.n + 1):
        if pow2iter(component, i, ctx) == unity:
            return i
    raise PreconditionError(f"{component} は核の元ではありません。")


def _cycle_row(cycle: CycleRecord) -> Dict[str, Any]:
    return {
        "nodes": list(cycle.nodes),
        "length": cycle.length,
        "mu": cycle.s_period,
        "nu": cycle.p_period,
        "s_laps": cycle.s_laps,
        "p_laps": cycle.p_laps,
    }
