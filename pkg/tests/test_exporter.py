"""
Tests for CSV, JSON and Excel export
"""

import json

import numpy as np
import pandas as pd
import pytest

from utils.analyzer import CutTimeAnalyzer
from utils.exporter import DataExporter
from utils.pendulum import Stratum


@pytest.fixture
def exporter():
    return DataExporter()


class TestCsv:
    def test_fixed_precision_and_line_endings(self, exporter):
        text = exporter.to_csv(pd.DataFrame({"a": [1.0 / 3.0], "b": ["x"]}))
        assert text == "a,b\n0.333333333333333,x\n"

    def test_record_becomes_one_row(self, exporter):
        text = exporter.render({"stratum": "C2", "k": 0.5}, "csv")
        assert text.splitlines() == ["stratum,k", "C2,0.5"]


class TestJson:
    def test_special_floats(self, exporter):
        payload = json.loads(exporter.to_json({"t": float("inf"), "ratio": float("nan"), "n": np.int64(3)}))
        assert payload == {"n": 3, "ratio": None, "t": "inf"}

    def test_sorted_keys_and_newline(self, exporter):
        text = exporter.to_json({"b": 1, "a": Stratum.C6})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["a"] == "C6"

    def test_frame_is_a_list_of_records(self, exporter):
        frame = pd.DataFrame({"k": [0.1, 0.2], "t": [1.5, np.inf]})
        assert json.loads(exporter.render(frame, "json")) == [{"k": 0.1, "t": 1.5}, {"k": 0.2, "t": "inf"}]


class TestExcel:
    def test_workbook_sheets(self):
        exporter = DataExporter(CutTimeAnalyzer(ks=[0.0, 0.5], workers=1))
        extra = {"Targets": pd.DataFrame({"x": [1.0]})}
        workbook = pd.read_excel(exporter.export_to_excel(extra), sheet_name=None, engine="openpyxl")
        assert list(workbook) == ["Summary", "Maxwell times", "Cut times", "Targets"]
        assert len(workbook["Cut times"]) == 4
        assert "zeta" in workbook["Summary"]["Constant"].tolist()

    def test_filename(self, exporter):
        name = exporter.get_filename("xlsx")
        assert name.startswith("cartan_report_") and name.endswith(".xlsx")
