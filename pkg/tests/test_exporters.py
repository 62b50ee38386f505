import json

import pytest

from models.ring_analyzer import EDGE_FIELDS, RingAnalyzer
from utils.exporters import SCHEMA_VERSION, edge_rows, load_export, to_csv, to_dot, to_json
from utils.html_generator import MAX_LISTED_CYCLES, generate_report_html


@pytest.fixture
def document(ctx_3_7):
    return RingAnalyzer(ctx_3_7, budget=10**4).export_document()


def test_json_round_trip_successor(document, ctx_3_7):
    text = to_json(document)
    assert text.endswith("}\n")
    successor = load_export(text)
    assert successor == {w: w * w % ctx_3_7.N for w in range(ctx_3_7.N)}


def test_json_is_deterministic(ctx_3_7):
    first = to_json(RingAnalyzer(ctx_3_7).export_document())
    second = to_json(RingAnalyzer(ctx_3_7).export_document())
    assert first == second


def test_load_export_rejects_other_schema(document):
    broken = dict(document, schema_version="0")
    with pytest.raises(ValueError):
        load_export(json.dumps(broken))
    without_edges = {key: value for key, value in document.items() if key != "edges"}
    with pytest.raises(ValueError):
        load_export(json.dumps(without_edges))
    assert document["schema_version"] == SCHEMA_VERSION


def test_dot_lists_cycles_first(document, ctx_3_7):
    text = to_dot(document)
    lines = text.splitlines()
    assert lines[0] == 'digraph "Z_3x7" {'
    assert lines[-1] == "}"
    assert lines[1].startswith("  // cycle 0")
    edges = [line.strip() for line in lines if "->" in line]
    assert len(edges) == ctx_3_7.N
    assert "0 -> 0;" in edges


def test_csv_edges(document, ctx_3_7):
    text = to_csv(edge_rows(document), EDGE_FIELDS)
    lines = text.splitlines()
    assert lines[0] == "w,successor,class,cyclic"
    assert len(lines) == ctx_3_7.N + 1
    assert lines[1] == "0,0,Zero,1"


def test_csv_joins_lists():
    text = to_csv([{"nodes": [1, 2, 3], "length": 3}], ["nodes", "length"])
    assert text == "nodes,length\n1 2 3,3\n"


def test_html_report(document):
    html = generate_report_html(document, title="テスト")
    assert html.startswith("<!DOCTYPE html>")
    assert "<title>テスト</title>" in html
    assert "9 分割" in html
    assert "DSet" in html


def test_html_truncates_cycle_list(document):
    many = dict(document, cycles=[{"nodes": [0], "mu": 1, "nu": 1, "laps": {"s": 1, "p": 1}}] * (MAX_LISTED_CYCLES + 1))
    html = generate_report_html(many)
    assert f"先頭 {MAX_LISTED_CYCLES} 個のみ" in html


def test_html_warns_on_max_cycle_mismatch(ctx_11_23):
    document = RingAnalyzer(ctx_11_23, budget=10**4).export_document()
    assert document["cardinalities"]["max_cycle_mismatch"] is True
    assert 'class="warning"' in generate_report_html(document)
