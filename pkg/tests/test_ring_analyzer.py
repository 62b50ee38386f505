import os

import pytest

from conftest import SMALL_PAIRS
from models.errors import BudgetExceededError, PreconditionError
from models.ring_analyzer import KERNEL_TREE_FIELDS, RingAnalyzer
from models.ring_core import build_context
from utils.exporters import load_export


@pytest.fixture
def analyzer(ctx_11_23):
    return RingAnalyzer(ctx_11_23, budget=10**5)


def test_summary(analyzer):
    summary = analyzer.summary()
    assert summary["context"]["N"] == 253
    assert summary["context"]["u_s"] == 231
    card = summary["cardinalities"]
    assert card["claimed_max_cycle"] == 10
    assert card["observed_max_cycle"] == 20
    assert card["max_cycle_mismatch"] is True
    assert summary["cycle_histogram"] == {1: 4, 4: 2, 10: 2, 20: 2}


def test_partition_counts_keys(analyzer):
    counts = analyzer.partition_counts()
    assert list(counts) == [
        "Zero", "SKernel", "SFieldRest", "PKernel", "PFieldRest",
        "RingKernel", "OffByOneS", "OffByOneP", "DSet",
    ]
    assert sum(counts.values()) == 253


def test_kernel_tree_rows_29_41(ctx_29_41):
    rows = RingAnalyzer(ctx_29_41).kernel_tree_rows()
    assert len(rows) == 32
    assert set(rows[0]) == set(KERNEL_TREE_FIELDS)
    assert rows[0] == {"value": 1, "level": 0, "xs": ctx_29_41.u_s, "xs_level": 0, "yp": ctx_29_41.u_p, "yp_level": 0}
    for row in rows:
        assert row["level"] == max(row["xs_level"], row["yp_level"])
        assert row["xs_level"] <= ctx_29_41.l
        assert row["yp_level"] <= ctx_29_41.k


@pytest.mark.parametrize("s, p", SMALL_PAIRS)
def test_kernel_tree_rows_level_rule(s, p):
    ctx = build_context(s, p)
    rows = RingAnalyzer(ctx).kernel_tree_rows()
    assert len(rows) == 1 << (ctx.k + ctx.l)
    for row in rows:
        assert row["level"] == max(row["xs_level"], row["yp_level"]), row
        assert (row["xs"] + row["yp"]) % ctx.N == row["value"]


def test_cycle_rows(analyzer):
    rows = analyzer.cycle_rows("p-field")
    assert [row["nodes"] for row in rows] == [[0], [23], [69, 207, 92, 115]]
    assert rows[2]["mu"] == 4 and rows[2]["nu"] == 1
    assert rows[2]["s_laps"] == 1 and rows[2]["p_laps"] == 4


def test_domains_are_closed(analyzer):
    for name in analyzer.available_domains:
        rows = analyzer.cycle_rows(name)
        assert rows
    with pytest.raises(PreconditionError):
        analyzer.domain("unknown")


def test_graph_respects_budget(ctx_11_23):
    with pytest.raises(BudgetExceededError):
        RingAnalyzer(ctx_11_23, budget=100).graph


def test_export_document(analyzer):
    document = analyzer.export_document()
    assert list(document)[:3] == ["schema_version", "s", "p"]
    assert len(document["edges"]) == 253
    assert len(document["classes"]) == 253
    assert document["classes"]["24"] == "OffByOneP"
    assert sum(len(cycle["nodes"]) for cycle in document["cycles"]) == 4 + 8 + 20 + 40
    with pytest.raises(PreconditionError):
        analyzer.render(document, "xml")


def test_save_export(analyzer, tmp_path):
    document = analyzer.export_document()
    path = analyzer.save_export(document, "json", str(tmp_path / "out" / "graph.json"))
    with open(path, encoding="utf-8") as f:
        assert load_export(f.read())[16] == 3

    html_path = analyzer.generate_html(document, str(tmp_path / "report.html"))
    assert os.path.exists(html_path)


def test_save_export_default_name(analyzer, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = analyzer.save_export(analyzer.export_document(), "dot")
    assert path.startswith("exports/zsp_11_23_")
    assert path.endswith(".dot")
    assert (tmp_path / path).exists()
