"""
Result files. JSON floats and pandas' CSV writer both emit the shortest
round-trip representation of a double, so read-back values are exact.
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd


def _plain(value):
    """numpy scalars and containers → JSON-native types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(_plain(row)) + "\n")
    return path


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(obj), fh, indent=2)
        fh.write("\n")
    return path


def write_table(path: Path, rows: list[dict] | dict[str, np.ndarray]) -> Path:
    """CSV with a header row: a list of records, or a dict of equal-length columns."""
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(path, index=False)
    return path


def format_table(rows: list[dict], columns: list[str]) -> str:
    df = pd.DataFrame(rows, columns=columns)
    return df.to_string(index=False, float_format=lambda v: f"{v:.3e}")
