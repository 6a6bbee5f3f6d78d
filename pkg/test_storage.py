import math
import os
import sys
from pathlib import Path

import orjson
import pandas as pd
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from simulation.montecarlo import DROP_COLUMNS
from storage.layout import ResultsLayout
from storage.writer_csv import ResultsWriter


def test_layout_paths(tmp_path):
    layout = ResultsLayout(str(tmp_path))

    assert layout.get_artifact_path("fig1", "summary") == tmp_path / "fig1" / "summary.json"
    assert layout.get_artifact_path("fig1", "bounds", scenario="fig 2tier/a3") == tmp_path / "fig1" / "fig_2tier_a3" / "bounds.csv"

    with pytest.raises(ValueError):
        layout.get_artifact_path("fig1", "parquet")

    layout.ensure_directories("fig2")
    layout.ensure_directories("fig1")
    assert layout.list_runs() == ["fig1", "fig2"]
    assert ResultsLayout(str(tmp_path / "empty")).list_runs() == []


def test_write_drops_uses_one_based_tiers(tmp_path):
    drops = pd.DataFrame(
        {
            "trial": [0, 1],
            "tier": [1, -1],
            "distance": [0.25, math.nan],
            "fading": [1.1, math.nan],
            "interference": [3.0, 0.5],
            "sinr": [2.0, 0.0],
            "rate": [math.log1p(2.0), math.nan],
        },
        columns=DROP_COLUMNS
    )
    path = ResultsWriter().write_drops(drops, tmp_path / "run" / "drops.csv")

    lines = Path(path).read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(DROP_COLUMNS)
    loaded = pd.read_csv(path)
    assert loaded["tier"].tolist() == [2, 0]
    assert loaded["rate"].iloc[0] == math.log1p(2.0)
    assert math.isnan(loaded["rate"].iloc[1])
    # O DataFrame original não é alterado
    assert drops["tier"].tolist() == [1, -1]


def test_write_table_requires_columns(tmp_path):
    with pytest.raises(ValueError):
        ResultsWriter().write_table(pd.DataFrame({"a": [1]}), tmp_path / "x.csv", ["a", "b"])


def test_json_is_sorted_and_handles_non_finite(tmp_path):
    payload = {"b": math.inf, "a": [math.nan, -math.inf, 1.5]}
    data = ResultsWriter.dumps(payload)

    assert data == ResultsWriter.dumps(dict(reversed(list(payload.items()))))
    assert orjson.loads(data) == {"a": ["nan", "-inf", 1.5], "b": "inf"}

    path = ResultsWriter().write_json(payload, tmp_path / "out" / "summary.json")
    assert path.read_bytes() == data
