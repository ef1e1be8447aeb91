"""
Tests for the cut-time analyzer tables and anomaly checks
"""

import numpy as np
import pandas as pd
import pytest

import utils.analyzer
from config import Config
from utils.analyzer import CutTimeAnalyzer, default_moduli, normalized_covector
from utils.errors import ViolationError
from utils.maxwell import t1z, t2v
from utils.pendulum import Stratum, classify, modulus, normalization


@pytest.fixture(scope="module")
def analyzer():
    return CutTimeAnalyzer(ks=default_moduli(20), workers=1)


class TestHelpers:
    def test_default_moduli(self):
        np.testing.assert_allclose(default_moduli(4), [0.0, 0.25, 0.5, 0.75])

    def test_default_grid_size(self):
        assert len(default_moduli()) == Config.GRID_SIZE

    @pytest.mark.parametrize("stratum", [Stratum.C1, Stratum.C2])
    def test_normalized_covector(self, stratum):
        covector = normalized_covector(0.6, stratum)
        assert classify(covector) == stratum
        assert modulus(covector).k == pytest.approx(0.6, rel=1e-12)
        assert normalization(covector) == pytest.approx(1.0, rel=1e-12)


class TestTables:
    def test_maxwell_table(self, analyzer):
        table = analyzer.get_maxwell_table()
        assert list(table.columns) == ["k", "t1z", "t1v", "t2v", "t1_combined"]
        assert len(table) == 20
        assert table.loc[0, "t1z"] == pytest.approx(t1z(0.0))

    def test_maxwell_table_is_a_copy(self, analyzer):
        analyzer.get_maxwell_table().loc[0, "t1z"] = -1.0
        assert analyzer.get_maxwell_table().loc[0, "t1z"] > 0

    def test_cut_time_table(self, analyzer):
        table = analyzer.get_cut_time_table()
        assert list(table.columns) == ["family", "k", "mu_t_cut_engel", "mu_t_cut_cartan"]
        assert set(table["family"]) == {"inflectional", "non-inflectional"}
        assert len(table) == 40
        assert (table["mu_t_cut_cartan"] >= table["mu_t_cut_engel"]).all()

        circle = table[(table["family"] == "non-inflectional") & (table["k"] == 0.0)]
        assert circle["mu_t_cut_cartan"].iloc[0] == pytest.approx(t2v(0.0))

    def test_no_anomalies_on_a_healthy_grid(self, analyzer):
        assert analyzer.detect_anomalies() == []

    def test_anomaly_reported_for_bad_row(self, analyzer):
        broken = CutTimeAnalyzer(ks=[0.5], workers=1)
        table = analyzer.get_maxwell_table().iloc[[10]].reset_index(drop=True)
        table.loc[0, "t2v"] = 2.5
        broken._maxwell = table
        messages = broken.detect_anomalies()
        assert len(messages) == 1
        assert "t2v" in messages[0]

    def test_empty_grid(self):
        assert CutTimeAnalyzer(ks=[]).detect_anomalies() == []


class TestElastica:
    def test_family_frame(self):
        frame = CutTimeAnalyzer(ks=[]).get_elastica_family([0.5], samples=21)
        assert list(frame.columns) == ["family", "k", "arc", "t", "x", "y", "z", "v", "w", "theta"]
        assert len(frame) == 42
        inflectional = frame[frame["family"] == "inflectional"]
        # below k0 the Engel cut time is one period
        assert inflectional.loc[inflectional["t"] <= 1.0, "arc"].eq("engel").all()
        assert inflectional.loc[inflectional["t"] > 1.0 + 1e-9, "arc"].eq("cartan").all()
        assert set(frame["arc"]) == {"engel", "cartan"}


class TestSummary:
    def test_summary_stats(self):
        stats = CutTimeAnalyzer(ks=[]).get_summary_stats()
        assert stats["k0"] == pytest.approx(0.909, abs=2e-3)
        assert stats["t1z0"] == pytest.approx(1.430, abs=1e-3)
        assert stats["t2v0"] == pytest.approx(1.465, abs=1e-3)
        assert stats["t2v0_trigonometric"] == pytest.approx(stats["t2v0"], abs=1e-9)
        assert stats["zeta_below_two"] is True


class TestComparisonSweep:
    def test_sweep(self):
        frame = CutTimeAnalyzer(ks=[]).run_comparison_sweep(12, seed=3)
        assert len(frame) == 12
        assert frame["stratum"].tolist()[:3] == ["C1", "C2", "C6"]
        assert (frame["t_engel"] <= frame["t_cartan"] * (1 + 1e-9)).all()
        assert (frame["ratio"] < 2.0).all()

    def test_sweep_is_reproducible(self):
        first = CutTimeAnalyzer(ks=[]).run_comparison_sweep(6, seed=11)
        second = CutTimeAnalyzer(ks=[]).run_comparison_sweep(6, seed=11)
        pd.testing.assert_frame_equal(first, second)

    def test_violation_propagates(self, monkeypatch):
        def broken(covector):
            raise ViolationError("forced")

        monkeypatch.setattr(utils.analyzer, "compare", broken)
        with pytest.raises(ViolationError):
            CutTimeAnalyzer(ks=[]).run_comparison_sweep(1, seed=0)
