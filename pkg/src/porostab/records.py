"""Result records, their JSON schema, the on-disk cache and CSV output."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

SCHEMA_VERSION = 1
CACHE_ENV = "POROSTAB_CACHE_DIR"
RECORD_TYPES = ("critical-point", "energy-trace", "squire-report")


def load_schema() -> dict:
    text = resources.files("porostab").joinpath("schema/result_record.schema.json").read_text()
    return json.loads(text)


def timestamp() -> str:
    """UTC ISO timestamp; honours SOURCE_DATE_EPOCH for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
            else _dt.datetime.now(_dt.timezone.utc))
    return when.replace(microsecond=0).isoformat()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@dataclass
class ResultRecord:
    record_type: str
    config: dict
    payload: dict
    convergence: dict = field(default_factory=dict)
    created: str = field(default_factory=timestamp)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return _jsonable({
            "schema_version": self.schema_version,
            "created": self.created,
            "record_type": self.record_type,
            "config": self.config,
            "payload": self.payload,
            "convergence": self.convergence,
        })

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        validate(d)
        return cls(record_type=d["record_type"], config=d["config"], payload=d["payload"],
                   convergence=d["convergence"], created=d["created"],
                   schema_version=d["schema_version"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, path) -> Path:
        data = self.to_dict()
        validate(data)
        path = Path(path)
        path.write_text(json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n")
        return path

    @classmethod
    def read(cls, path) -> "ResultRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))


def validate(data: dict) -> None:
    jsonschema.validate(data, load_schema())


def cache_key(config: dict) -> str:
    canon = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:32]


class ResultCache:
    """One JSON file per config hash under ``$POROSTAB_CACHE_DIR``."""

    def __init__(self, root=None):
        root = root or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "porostab"
        self.root = Path(root)

    def path(self, config: dict) -> Path:
        return self.root / f"{cache_key(config)}.json"

    def get(self, config: dict) -> ResultRecord | None:
        p = self.path(config)
        if not p.exists():
            return None
        try:
            return ResultRecord.read(p)
        except (json.JSONDecodeError, jsonschema.ValidationError):
            return None

    def put(self, record: ResultRecord) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        target = self.path(record.config)
        tmp = target.with_suffix(f".{os.getpid()}.tmp")
        record.write(tmp)
        os.replace(tmp, target)
        return target


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Header and rows (strings) from a CSV file."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return [], []
    return rows[0], rows[1:]
