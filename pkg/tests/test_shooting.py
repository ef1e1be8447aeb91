"""
Tests for canonicalization and the shooting solver
"""

import numpy as np
import pandas as pd
import pytest

from config import CLI_TEXT, Config
from utils import shooting
from utils.analyzer import normalized_covector
from utils.errors import ConvergenceError, DomainError
from utils.expmap import GroupPoint, dilate, exp, rotate, rotate_cov
from utils.maxwell import cut_time
from utils.pendulum import Covector, Stratum, sample_covector, wrap_angle
from utils.shooting import (
    RESULT_COLUMNS,
    SolverConfig,
    canonicalize,
    distance,
    homogeneous_norm,
    seed_table,
    solve,
    solve_many,
)


def inflectional_target():
    covector = normalized_covector(0.45, Stratum.C1, phi=0.13)
    return covector, 0.55


def non_inflectional_target():
    covector = normalized_covector(0.6, Stratum.C2, phi=0.2)
    return covector, 0.7


def assert_reaches(result, q, atol=1e-7):
    np.testing.assert_allclose(exp(result.covector, result.t).as_array(), q.as_array(), atol=atol)


def covector_gap(a, b):
    """Largest difference of two covectors, angles compared modulo 2 pi"""
    angles = [abs(wrap_angle(a.theta - b.theta)), abs(wrap_angle(a.beta - b.beta))]
    return max(angles + [abs(a.c - b.c), abs(a.alpha - b.alpha)])


class TestCanonicalize:
    def test_canonical_form(self):
        q = GroupPoint(0.6, -0.8, 0.3, 0.2, -0.1)
        canonical, eta, mu = canonicalize(q)
        assert (canonical.x, canonical.y) == (0.0, 1.0)
        assert mu == pytest.approx(1.0)
        assert canonical.zV == pytest.approx(q.zV, rel=1e-12)

    def test_inverts_rotation_and_dilation(self):
        q = GroupPoint(1.5, 2.0, -0.7, 0.4, 1.1)
        canonical, eta, mu = canonicalize(q)
        rebuilt = dilate(mu, rotate(eta, q))
        np.testing.assert_allclose(rebuilt.as_array(), canonical.as_array(), atol=1e-12)
        assert canonical.zV == pytest.approx(q.zV / 2.5 ** 6, rel=1e-12)

    def test_zero_zv_rejected(self):
        with pytest.raises(DomainError):
            canonicalize(GroupPoint(1.0, 0.0, 0.0, 0.3, 0.2))

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            canonicalize(GroupPoint(1.0, float("nan"), 0.1, 0.3, 0.2))


class TestHomogeneousNorm:
    def test_weights(self):
        assert homogeneous_norm([0.1, -0.2, 0.09, 0.0, 0.0]) == pytest.approx(0.3)
        assert homogeneous_norm([0.0, 0.0, 0.0, -0.008, 0.001]) == pytest.approx(0.2)


class TestSeedTable:
    def test_no_seed_on_the_maxwell_set(self):
        table = seed_table()
        z, v, w = table.invariants.T
        assert np.all(table.params[:, 2] > 0.0)
        assert np.all(np.abs(z * (w - 0.5 * z)) > Config.ZERO_ZV)

    def test_seeds_are_canonical_geodesics(self):
        table = seed_table()
        assert len(table) > 1000
        for index in (0, len(table) // 2, len(table) - 1):
            theta, c, alpha, beta, t = table.params[index]
            q = exp(Covector.from_signed(theta, c, alpha, beta), t)
            np.testing.assert_allclose([q.x, q.y], [0.0, 1.0], atol=1e-6)
            np.testing.assert_allclose([q.z, q.v, q.w], table.invariants[index], atol=1e-6)


class TestSolve:
    @pytest.mark.parametrize("target", [inflectional_target, non_inflectional_target])
    def test_recovers_geodesic_before_cut_time(self, target):
        covector, t = target()
        q = exp(covector, t)
        result = solve(q)
        assert_reaches(result, q)
        assert result.t == pytest.approx(t, abs=1e-6)
        assert result.t <= cut_time(result.covector) * (1 + 1e-9)
        assert result.residual <= SolverConfig().tol
        assert result.flags == []

    def test_rotated_and_dilated_target(self):
        covector, t = inflectional_target()
        moved = Covector(covector.theta + 1.0, 2.0 * covector.c, 4.0 * covector.alpha, 1.0)
        q = exp(moved, 0.5 * t)
        result = solve(q)
        assert_reaches(result, q)
        assert result.distance == pytest.approx(0.5 * t, abs=1e-6)

    def test_result_record(self):
        covector, t = non_inflectional_target()
        record = solve(exp(covector, t)).to_dict()
        assert record["stratum"] == "C2"
        assert record["distance"] == record["t"]
        assert record["starts_tried"] >= 1

    def test_zero_zv_is_outside_domain(self):
        with pytest.raises(DomainError):
            solve(GroupPoint(0.0, 1.0, 0.0, 0.5, 0.2))

    def test_circle_endpoint_is_outside_domain(self):
        # V vanishes along circles, so every C6 end point has zV = 0 up to integrator noise
        q = exp(Covector(0.3, 2.0, 0.0, 0.0), 1.0)
        assert abs(q.zV) / (q.x ** 2 + q.y ** 2) ** 3 < Config.ZERO_ZV
        with pytest.raises(DomainError):
            solve(q)

    def test_budget_counts_evaluations(self, monkeypatch):
        budgets = []
        real = shooting.least_squares

        def spy(*args, **kwargs):
            budgets.append(kwargs["max_nfev"])
            return real(*args, **kwargs)

        monkeypatch.setattr(shooting, "least_squares", spy)
        covector, t = inflectional_target()
        solve(exp(covector, t), SolverConfig(max_iter=60))
        assert budgets and set(budgets) == {360}

    def test_rotation_equivariance(self):
        covector, t = non_inflectional_target()
        q = exp(covector, t)
        eta = 0.7
        base, rotated = solve(q), solve(rotate(eta, q))
        expected = rotate_cov(eta, base.covector)
        assert rotated.t == pytest.approx(base.t, abs=1e-7)
        assert covector_gap(rotated.covector, expected) < 1e-6

    def test_convergence_error_carries_best_residual(self):
        covector, t = inflectional_target()
        cfg = SolverConfig(tol=1e-30, max_starts=1, max_iter=1)
        with pytest.raises(ConvergenceError) as excinfo:
            solve(exp(covector, t), cfg)
        assert excinfo.value.best_residual > cfg.tol

    def test_ill_conditioned_flag(self):
        covector, t = inflectional_target()
        result = solve(exp(covector, t), SolverConfig(ill_conditioned_zv=1e6))
        assert result.flags == [CLI_TEXT["warning_ill_conditioned"]]

    def test_distance_is_homogeneous(self):
        covector, t = non_inflectional_target()
        q = exp(covector, t)
        assert distance(dilate(2.0, q)) == pytest.approx(2.0 * distance(q), rel=1e-6)


class TestSolveMany:
    def test_rows_keep_order_and_report_errors(self):
        covector, t = inflectional_target()
        good = exp(covector, t)
        targets = pd.DataFrame(
            [good.as_array(), [0.0, 1.0, 0.0, 0.5, 0.2]], columns=["x", "y", "z", "v", "w"]
        )
        frame = solve_many(targets, workers=1)
        assert list(frame.columns) == RESULT_COLUMNS
        assert frame["status"].tolist() == ["ok", "error"]
        assert frame.loc[0, "distance"] == pytest.approx(t, abs=1e-6)
        assert frame.loc[1, "message"].startswith("DomainError")


@pytest.mark.slow
class TestRandomTargets:
    @pytest.mark.parametrize("stratum, k", [(Stratum.C1, None), (Stratum.C2, 0.3), (Stratum.C2, 0.7)])
    def test_round_trip(self, rng, stratum, k):
        for _ in range(8):
            covector = sample_covector(rng, stratum, k=k)
            t = rng.uniform(0.1, 0.85) * cut_time(covector)
            q = exp(covector, t)
            if abs(q.zV) / (q.x ** 2 + q.y ** 2) ** 3 < 1e-8:
                continue
            result = solve(q)
            assert_reaches(result, q, atol=1e-6)
            assert result.t == pytest.approx(t, rel=1e-6)
            assert covector_gap(result.covector, covector) < 1e-5 * max(1.0, covector.alpha, abs(covector.c))
