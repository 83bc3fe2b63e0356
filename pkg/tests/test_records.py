import json

import jsonschema
import pytest

from porostab.records import (SCHEMA_VERSION, ResultCache, ResultRecord, cache_key, fmt, read_csv,
                              timestamp, validate, write_csv)


def sample_record(**kw):
    payload = {"kind": "linear", "M": 0.0, "a_c": 1.02, "R_c": 5772.2, "N": 96,
               "convergence": 1e-11, "b_c": 0.0, "extra": {}, "converged": True}
    payload.update(kw)
    return ResultRecord("critical-point", {"M": 0.0, "N": 96}, payload, {"N": 96})


def test_round_trip(tmp_path):
    rec = sample_record()
    path = rec.write(tmp_path / "r.json")
    back = ResultRecord.read(path)
    assert back == rec
    assert json.loads(path.read_text())["schema_version"] == SCHEMA_VERSION


def test_infinities_become_null(tmp_path):
    rec = sample_record(R_c=float("inf"), converged=False)
    data = json.loads(rec.to_json())
    assert data["payload"]["R_c"] is None


def test_schema_rejects_missing_fields():
    data = sample_record().to_dict()
    del data["payload"]["R_c"]
    with pytest.raises(jsonschema.ValidationError):
        validate(data)
    with pytest.raises(jsonschema.ValidationError):
        validate({"record_type": "critical-point"})


def test_timestamp_is_reproducible(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    assert timestamp() == "1970-01-01T00:00:00+00:00"


def test_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("POROSTAB_CACHE_DIR", str(tmp_path / "c"))
    cache = ResultCache()
    rec = sample_record()
    assert cache.get(rec.config) is None
    cache.put(rec)
    assert cache.get(rec.config) == rec
    assert cache_key({"b": 1, "a": 2}) == cache_key({"a": 2, "b": 1})
    cache.path(rec.config).write_text("{not json")
    assert cache.get(rec.config) is None


def test_csv_formatting(tmp_path):
    path = write_csv(tmp_path / "x.csv", ["a", "b", "c", "d"], [(0.1, 3, True, None)])
    header, rows = read_csv(path)
    assert header == ["a", "b", "c", "d"]
    assert rows == [["0.10000000000000001", "3", "true", ""]]
    assert float(fmt(1 / 3)) == 1 / 3
    assert read_csv(write_csv(tmp_path / "e.csv", [], [])) == ([], [])
