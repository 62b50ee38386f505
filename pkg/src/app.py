"""
ℤ_sp の平方写像を解析するコマンドラインアプリケーション
"""
import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from models.errors import ZspError
from models.factor_demos import FactorResult, collision_factor, cyclic_attack
from models.graph_dynamics import arc_of, arc_tree_mul, tree_of
from models.partition import cardinalities
from models.ring_analyzer import CYCLE_FIELDS, KERNEL_TREE_FIELDS, RingAnalyzer
from models.ring_core import build_context
from models.verification import run_verification
from utils.config import configure_logging, load_settings
from utils.exporters import FORMATS, to_csv, to_json

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2

DOMAINS = ("ring", "units", "dset", "s-field", "p-field", "kernel")

# サブコマンドごとに対応する出力形式（先頭が既定）
COMMAND_FORMATS = {
    "analyze": ("text", "json"),
    "partition": ("text", "json", "csv"),
    "kernel-tree": ("text", "json", "csv"),
    "cycles": ("text", "json", "csv"),
    "arc-tree-mul": ("text", "json"),
    "factor": ("text", "json"),
    "verify": ("text", "json"),
    "export": ("json",) + tuple(f for f in FORMATS if f != "json"),
}


class _ArgumentParser(argparse.ArgumentParser):
    """使い方の誤りを終了コード 1 で報告するパーサ"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: エラー: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="出力先ファイル（省略時は標準出力）")
    common.add_argument("--budget", type=int, default=settings.budget, help="全列挙の要素数の上限")
    common.add_argument("--workers", type=int, default=settings.workers, help="分類を並列に行うプロセス数")
    common.add_argument("--log-level", default=settings.log_level, help="ログレベル（DEBUG, INFO, WARNING など）")

    parser = _ArgumentParser(prog="zsp", description="ℤ_sp の平方写像の構造を解析します。")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("analyze", "コンテキスト、各集合の大きさ、巡回長の分布を表示"),
        ("partition", "9 分割の要素数を表示"),
        ("kernel-tree", "𝒯_n(1) の節点とレベルを表示"),
        ("verify", "不変条件を全数検査"),
        ("export", "グラフ全体を DOT / JSON / CSV / HTML で出力"),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("s", type=int)
        sub.add_argument("p", type=int)

    cycles = subparsers.add_parser("cycles", parents=[common], help="定義域内の巡回を表示")
    cycles.add_argument("s", type=int)
    cycles.add_argument("p", type=int)
    cycles.add_argument("--domain", choices=DOMAINS, default="ring")

    arc = subparsers.add_parser("arc-tree-mul", parents=[common], help="弧と 𝒯_n(1) の積を表示")
    arc.add_argument("s", type=int)
    arc.add_argument("p", type=int)
    arc.add_argument("a", type=int, help="巡回元")
    arc.add_argument("--height", type=int, default=None, help="弧の長さと木の高さ（既定は max(k, l)）")

    factor = subparsers.add_parser("factor", parents=[common], help="小規模な因数分解のデモ")
    factor.add_argument("N", type=int)
    factor.add_argument("--method", choices=("cyclic", "collision"), default="cyclic")
    factor.add_argument("--w", type=int, default=None, help="cyclic の開始値")
    factor.add_argument("--x", type=int, default=None, help="collision の x")
    factor.add_argument("--y", type=int, default=None, help="collision の y")
    factor.add_argument("--max-iter", type=int, default=1024, help="平方の回数の上限")

    for name, sub in subparsers.choices.items():
        formats = COMMAND_FORMATS[name]
        sub.add_argument("--format", choices=formats, default=formats[0], help=f"出力形式（既定は {formats[0]}）")

    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if not out:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)


def _key_values(values: Dict[str, Any]) -> str:
    return " ".join(f"{key}={value}" for key, value in values.items())


def _cmd_analyze(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    summary = analyzer.summary()
    if args.format == "json":
        _emit(to_json(summary), args.out)
        return EXIT_OK
    card = summary["cardinalities"]
    lines = [
        _key_values(summary["context"]),
        _key_values({key: card[key] for key in ("n_multiples", "n_offbyone", "n_dset", "n_kernel", "n_dset_cyclic")}),
        _key_values({key: card[key] for key in ("claimed_max_cycle", "observed_max_cycle", "max_cycle_mismatch")}),
        "cycle_histogram " + " ".join(f"{length}:{count}" for length, count in summary["cycle_histogram"].items()),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_partition(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    counts = analyzer.partition_counts()
    if args.format == "json":
        _emit(to_json(counts), args.out)
    elif args.format == "csv":
        _emit(to_csv([{"class": name, "count": count} for name, count in counts.items()], ["class", "count"]), args.out)
    else:
        _emit("".join(f"{name} {count}\n" for name, count in counts.items()), args.out)
    return EXIT_OK


def _emit_rows(args: argparse.Namespace, rows: List[Dict[str, Any]], fields: List[str]) -> None:
    if args.format == "json":
        _emit(to_json(rows), args.out)
    elif args.format == "csv":
        _emit(to_csv(rows, fields), args.out)
    else:
        _emit(to_csv(rows, fields).replace(",", " "), args.out)


def _cmd_kernel_tree(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    _emit_rows(args, analyzer.kernel_tree_rows(), KERNEL_TREE_FIELDS)
    return EXIT_OK


def _cmd_cycles(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    _emit_rows(args, analyzer.cycle_rows(args.domain), CYCLE_FIELDS)
    return EXIT_OK


def _cmd_arc_tree_mul(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    ctx = analyzer.ctx
    height = ctx.n if args.height is None else args.height
    arc = arc_of(args.a, height, ctx)
    product = arc_tree_mul(arc, tree_of(1, height, ctx), ctx)
    direct = tree_of(args.a, height, ctx)
    matches = product.levels == direct.levels and product.parent == direct.parent
    result = {
        "arc": list(arc.nodes),
        "root": product.root,
        "levels": [list(level) for level in product.levels],
        "matches_tree_of": matches,
    }
    if args.format == "json":
        _emit(to_json(result), args.out)
    else:
        lines = [f"arc {' '.join(map(str, arc.nodes))}"]
        lines += [f"level {i}: {' '.join(map(str, level))}" for i, level in enumerate(product.levels)]
        lines.append(f"matches_tree_of {matches}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    report = run_verification(analyzer.ctx, args.budget)
    skipped = [check.name for check in report.skipped]
    if args.format == "json":
        _emit(to_json({
            "s": report.s,
            "p": report.p,
            "passed": report.passed,
            "complete": report.complete,
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in report.checks],
        }), args.out)
    else:
        lines = [f"[{check.status}] {check.name} {check.detail}".rstrip() for check in report.checks]
        lines.append("verification " + ("passed" if report.passed else "failed"))
        if skipped:
            lines.append(f"skipped {' '.join(skipped)}")
        _emit("\n".join(lines) + "\n", args.out)
    if skipped:
        logger.warning("予算を超えたため省略した検査があります: %s（--budget で上限を変更できます）", ", ".join(skipped))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _cmd_export(args: argparse.Namespace, analyzer: RingAnalyzer) -> int:
    document = analyzer.export_document()
    _emit(analyzer.render(document, args.format), args.out)
    return EXIT_OK


def _cmd_factor(args: argparse.Namespace) -> Optional[FactorResult]:
    if args.method == "cyclic":
        if args.w is None:
            return None
        return cyclic_attack(args.N, args.w, args.max_iter)
    if args.x is None or args.y is None:
        return None
    return collision_factor(args.N, args.x, args.y)


COMMANDS = {
    "analyze": _cmd_analyze,
    "partition": _cmd_partition,
    "kernel-tree": _cmd_kernel_tree,
    "cycles": _cmd_cycles,
    "arc-tree-mul": _cmd_arc_tree_mul,
    "verify": _cmd_verify,
    "export": _cmd_export,
}


def run(argv: Sequence[str]) -> int:
    """
    コマンドを実行する

    Args:
        argv: プログラム名を除いた引数

    Returns:
        終了コード（0: 成功, 1: 使い方の誤り, 2: 検査の失敗）
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.log_level)
    logger.debug("引数: %s", args)

    try:
        if args.command == "factor":
            result = _cmd_factor(args)
            if result is None:
                option = "--w" if args.method == "cyclic" else "--x と --y"
                sys.stderr.write(f"エラー: --method {args.method} には {option} が必要です。\n")
                return EXIT_USAGE
            if args.format == "json":
                payload = {"factor": result.factor, "iterations": result.iterations, "method": result.method}
                _emit(to_json(payload), args.out)
                return EXIT_OK
            factor = "none" if result.factor is None else str(result.factor)
            _emit(f"factor={factor} iterations={result.iterations} method={result.method}\n", args.out)
            return EXIT_OK

        ctx = build_context(args.s, args.p)
        logger.info("s=%d, p=%d, N=%d, 閉じた式: %s", ctx.s, ctx.p, ctx.N, cardinalities(ctx))
        analyzer = RingAnalyzer(ctx, budget=args.budget, workers=args.workers)
        return COMMANDS[args.command](args, analyzer)
    except ZspError as exc:
        sys.stderr.write(f"エラー: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
