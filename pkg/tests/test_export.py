import json
import os

import numpy as np

from unidisc.storage.models import RunStatus
from unidisc.utils.export import canonical_json, config_hash, svg_polyline, write_report, write_trace_csv


def test_canonical_json_is_plain_and_sorted():
    text = canonical_json({"b": np.float64(1.5), "a": 0.5 - 2j, "c": float("nan"), "d": np.array([1, 2])}, indent=None)
    assert text == '{"a": [0.5, -2.0], "b": 1.5, "c": "nan", "d": [1, 2]}'


def test_config_hash_ignores_key_order():
    first = {"map": {"kind": "koebe"}, "seed": 1}
    second = {"seed": 1, "map": {"kind": "koebe"}}
    assert config_hash(first) == config_hash(second)
    assert config_hash(first) != config_hash({**first, "seed": 2})


def test_reports_are_byte_stable(tmp_path):
    path = str(tmp_path / "out" / "norms.json")
    report = {"value": 6.0, "argmax": 0.5 + 0j}
    config = {"command": "norms"}
    first = write_report(path, report, config, "1.0.0")
    with open(path, "rb") as handle:
        payload = handle.read()
    second = write_report(path, report, config, "1.0.0")
    with open(path, "rb") as handle:
        assert handle.read() == payload
    assert first == second
    assert os.path.exists(path + ".meta.json")
    document = json.loads(payload)
    assert document["config_hash"] == config_hash(config)
    assert document["report"]["argmax"] == [0.5, 0.0]


def test_trace_csv(tmp_path):
    path = str(tmp_path / "trace.csv")
    write_trace_csv(path, [(0.0, 1.0, 0.0), (3.0, -1.0, 0.25)])
    with open(path) as handle:
        lines = handle.read().splitlines()
    assert lines[0] == "t,re,im"
    assert lines[2] == "3.0,-1.0,0.25"


def test_svg_polyline():
    svg = svg_polyline(np.exp(2j * np.pi * np.arange(8) / 8))
    assert svg.startswith("<svg")
    assert "<polyline" in svg


def test_ledger_records_runs_and_artifacts(ledger):
    run = ledger.start_run("norms", {"command": "norms"}, "abc", "1.0.0", seed=5)
    ledger.add_artifact(run, "json", "reports/norms.json", "f" * 64)
    ledger.finish_run(run, RunStatus.PASSED, "ok")

    stored = ledger.get_run(run.id)
    assert stored.status == RunStatus.PASSED
    assert stored.finished_at is not None
    assert [a.kind for a in stored.artifacts] == ["json"]
    assert ledger.runs_for_config("abc") == [stored]
    assert ledger.recent_runs(1) == [stored]
