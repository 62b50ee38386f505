"""
エクスポート文書を DOT / JSON / CSV に変換するユーティリティ
"""
import csv
import io
import json
from typing import Any, Dict, Iterable, List, Mapping

SCHEMA_VERSION = "1"

FORMATS = ("dot", "json", "csv", "html")


def to_json(document: Mapping[str, Any]) -> str:
    """
    エクスポート文書を JSON 文字列にする

    キーの順序は文書の構築順のまま、インデント 2 で出力する。
    """
    return json.dumps(document, ensure_ascii=False, indent=2) + "\n"


def to_dot(document: Mapping[str, Any]) -> str:
    """
    後続関数のグラフを DOT 形式にする

    巡回の辺を先に、残りの辺を節点の昇順で出力する。
    """
    lines = [f'digraph "Z_{document["s"]}x{document["p"]}" {{']
    emitted = set()
    for index, cycle in enumerate(document["cycles"]):
        nodes = cycle["nodes"]
        lines.append(f"  // cycle {index}: length {len(nodes)}")
        for t, w in enumerate(nodes):
            lines.append(f"  {w} -> {nodes[(t + 1) % len(nodes)]};")
            emitted.add(w)
    for w, image in document["edges"]:
        if w not in emitted:
            lines.append(f"  {w} -> {image};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_csv(rows: Iterable[Mapping[str, Any]], fieldnames: List[str]) -> str:
    """
    行の列を CSV にする（区切りは ","、改行は "\\n"）
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key)) for key in fieldnames})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return value


def edge_rows(document: Mapping[str, Any]) -> List[Dict[str, Any]]:
    """CSV 用の辺の行 (w, successor, class, cyclic)"""
    classes = document.get("classes", {})
    cyclic = {w for cycle in document["cycles"] for w in cycle["nodes"]}
    return [
        {"w": w, "successor": image, "class": classes.get(str(w), ""), "cyclic": int(w in cyclic)}
        for w, image in document["edges"]
    ]


def load_export(text: str) -> Dict[int, int]:
    """
    JSON エクスポートを読み戻し、後続関数を復元する

    Raises:
        ValueError: スキーマのバージョンが異なる、または辺の一覧が無い場合
    """
    document = json.loads(text)
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"未対応のスキーマバージョンです: {version}")
    if "edges" not in document:
        raise ValueError("エクスポートに辺の一覧 (edges) がありません。")
    return {int(w): int(image) for w, image in document["edges"]}
