"""
エクスポート文書をHTMLレポートに変換するユーティリティ
"""
from html import escape
from typing import Any, Dict, List, Mapping

# 一覧に載せる巡回の上限
MAX_LISTED_CYCLES = 200


def _table(headers: List[str], rows: List[List[Any]]) -> str:
    head = "".join(f"<th>{escape(str(h))}</th>" for h in headers)
    body = "".join(
        "<tr>" + "".join(f"<td>{escape(str(cell))}</td>" for cell in row) + "</tr>"
        for row in rows
    )
    return f"<table><thead><tr>{head}</tr></thead><tbody>{body}</tbody></table>"


def generate_report_html(document: Mapping[str, Any], title: str = "ℤ_sp 平方写像レポート") -> str:
    """
    エクスポート文書をHTMLに変換する

    Args:
        document: RingAnalyzer.export_document() の戻り値
        title: HTMLのタイトル

    Returns:
        HTML文字列
    """
    context: Dict[str, Any] = document["context"]
    html_content = f"""<!DOCTYPE html>
<html lang="ja">
<head>
    <meta charset="UTF-8">
    <meta name="viewport" content="width=device-width, initial-scale=1.0">
    <title>{escape(title)}</title>
    <style>
        body {{
            font-family: 'Helvetica Neue', Arial, sans-serif;
            line-height: 1.6;
            color: #333;
            max-width: 960px;
            margin: 0 auto;
            padding: 20px;
            background-color: #f5f5f5;
        }}
        .section {{
            background-color: white;
            border-radius: 10px;
            box-shadow: 0 2px 10px rgba(0,0,0,0.1);
            padding: 20px;
            margin-bottom: 20px;
        }}
        h1 {{
            text-align: center;
            color: #2c3e50;
        }}
        h2 {{
            margin-top: 0;
            font-size: 1.2em;
            color: #2c3e50;
        }}
        table {{
            border-collapse: collapse;
            width: 100%;
            font-size: 0.9em;
        }}
        th, td {{
            border-bottom: 1px solid #eee;
            padding: 4px 8px;
            text-align: right;
        }}
        td:last-child {{
            text-align: left;
            font-family: monospace;
            word-break: break-all;
        }}
        .warning {{
            color: #c0392b;
            font-weight: bold;
        }}
    </style>
</head>
<body>
    <h1>{escape(title)}</h1>
"""

    html_content += '<div class="section"><h2>コンテキスト</h2>'
    html_content += _table(list(context.keys()), [list(context.values())])
    html_content += "</div>"

    html_content += '<div class="section"><h2>9 分割</h2>'
    html_content += _table(["部分集合", "要素数"], [[name, count] for name, count in document["partition"].items()])
    cardinalities = document.get("cardinalities")
    if cardinalities:
        html_content += _table(list(cardinalities.keys()), [list(cardinalities.values())])
        if cardinalities.get("max_cycle_mismatch"):
            html_content += (
                '<p class="warning">最大巡回長の主張値 '
                f'{cardinalities["claimed_max_cycle"]} と観測値 {cardinalities["observed_max_cycle"]} が一致しません。</p>'
            )
    html_content += "</div>"

    cycles = document["cycles"]
    html_content += f'<div class="section"><h2>巡回（{len(cycles)} 個）</h2>'
    rows = [[len(c["nodes"]), c["mu"], c["nu"], c["laps"]["s"], c["laps"]["p"], " ".join(map(str, c["nodes"]))]
            for c in cycles[:MAX_LISTED_CYCLES]]
    html_content += _table(["長さ", "μ", "ν", "s 周回", "p 周回", "節点"], rows)
    if len(cycles) > MAX_LISTED_CYCLES:
        html_content += f"<p>先頭 {MAX_LISTED_CYCLES} 個のみ表示しています。</p>"
    html_content += "</div>"

    trees = document.get("trees", [])
    if trees:
        html_content += f'<div class="section"><h2>木（{len(trees)} 本）</h2>'
        tree_rows = [[t["root"], len(t["levels"]) - 1, " / ".join(str(len(level)) for level in t["levels"])] for t in trees]
        html_content += _table(["根", "高さ", "各レベルの節点数"], tree_rows)
        html_content += "</div>"

    html_content += """
</body>
</html>
"""
    return html_content
