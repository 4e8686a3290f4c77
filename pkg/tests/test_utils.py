import json

import numpy as np
import pandas as pd
import pytest

from utils.report import DiagnosticReport
from utils.tools import resolve_config, parse_list, stream, chunk_indices, parallel_map, default_workers, \
    write_manifest, load_yaml


def test_resolve_config_layers():
    defaults = {"alpha": 1.0, "N": 50, "nested": {"a": 1}}
    resolved = resolve_config(defaults, {"N": 10}, {"N": 3, "alpha": None})
    assert resolved == {"alpha": 1.0, "N": 3, "nested": {"a": 1}}
    resolved["nested"]["a"] = 2
    assert defaults["nested"]["a"] == 1


def test_resolve_config_accepts_manifest():
    manifest = {"command": "sample", "seed": 4, "config": {"N": 7}}
    assert resolve_config({"N": 50}, manifest)["N"] == 7


def test_parse_list():
    assert parse_list("50,100, 200", int) == [50, 100, 200]
    assert parse_list([1, 2.5]) == [1.0, 2.5]
    assert parse_list(None) is None


def test_stream_is_keyed():
    a = stream(1, 2, 3).standard_normal(4)
    np.testing.assert_array_equal(a, stream(1, 2, 3).standard_normal(4))
    assert not np.array_equal(a, stream(1, 3, 2).standard_normal(4))


def test_chunks_cover_every_index():
    chunks = chunk_indices(10, 3)
    np.testing.assert_array_equal(np.concatenate(chunks), np.arange(10))
    assert len(chunk_indices(2, 8)) == 2


def test_parallel_map_keeps_order():
    assert parallel_map(abs, [-3, 1, -2], workers=1, progress=False) == [3, 1, 2]


def test_default_workers(monkeypatch):
    monkeypatch.delenv("HEL_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("HEL_WORKERS", "4")
    assert default_workers() == 4
    monkeypatch.setenv("HEL_WORKERS", "many")
    with pytest.raises(ValueError):
        default_workers()


def test_manifest(tmp_path):
    path = write_manifest(tmp_path, "verify", 0, {"alpha": np.float64(1.5), "N_list": (50, 100)})
    manifest = load_yaml(path)
    assert manifest["command"] == "verify" and manifest["version"]
    assert manifest["config"] == {"alpha": 1.5, "N_list": [50, 100]}


def test_report_verdicts_and_json(tmp_path):
    report = DiagnosticReport("demo", {"N": np.int64(5)})
    report.add("info", 3.0)
    report.add("bounded", 0.5, tolerance=1.0)
    assert report.passed
    report.add("forced", np.inf, passed=False)
    assert report.verdict == "fail" and not report["forced"].passed
    report.tables["grid"] = pd.DataFrame({"x": [1.0, 2.0]})

    path = report.to_json(tmp_path / "demo.json")
    data = json.loads(path.read_text())
    assert data["params"] == {"N": 5}
    assert data["entries"][2]["value"] == "inf"
    assert [e["pass"] for e in data["entries"]] == [True, True, False]
    again = DiagnosticReport.from_dict(data)
    assert again["forced"].value == np.inf and again.verdict == "fail"
    written = report.write_tables(tmp_path / "tables")
    assert [p.name for p in written] == ["demo_grid.csv"]


def test_report_merge_prefixes():
    inner = DiagnosticReport("inner")
    inner.add("x", 1.0, tolerance=0.5)
    outer = DiagnosticReport("outer").merge(inner, prefix="a_")
    assert "a_x" in outer and not outer.passed
    with pytest.raises(KeyError):
        outer["x"]
