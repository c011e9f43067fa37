import math

import numpy as np
import pytest

from qsteer.capacity import MomentBody, contains
from qsteer.qops import conditional_state, isotropic_state, werner_state
from qsteer.radii import (
    FamilyKind,
    StateFamily,
    closed_form_r2,
    conditional_plane_point,
    critical_radius_dichotomic,
    critical_radius_rank,
    hierarchy_check,
    rank_minimality_scan,
    rank_radius_profile,
    reference_thresholds,
)
from oracles import random_rank_projection

W = FamilyKind.WERNER
S = FamilyKind.ISOTROPIC

# Anchor values evaluated from the closed forms themselves.
R2_W3 = 4.0 * (1.0 - math.sqrt(2.0 / 3.0))
R2_S3 = 1.0 - 1.0 / math.sqrt(3.0)


class TestConditionalPlanePoint:
    def test_noise_limit(self):
        for kind in (W, S):
            for d, r in ((4, 1), (4, 2), (7, 3)):
                p = conditional_plane_point(StateFamily(kind, d), r, 0.0)
                assert p.u == pytest.approx(r / d**2, abs=1e-15)
                assert p.v == pytest.approx(r / d**2, abs=1e-15)

    def test_pure_limits(self):
        for d in (2, 3, 4):
            p = conditional_plane_point(StateFamily(W, d), 1, 1.0)
            assert p.u == 0.0
            assert p.v == pytest.approx(1.0 / (d * (d - 1)), abs=1e-15)
            q = conditional_plane_point(StateFamily(S, d), 1, 1.0)
            assert q.u == pytest.approx(1.0 / d, abs=1e-15)
            assert q.v == 0.0

    def test_matches_matrix_conditionals(self):
        # Oracle: eigenvalue blocks of the actual partial-trace conditional.
        rng = np.random.default_rng(41)
        for d in (2, 3, 4):
            for r in range(1, d // 2 + 1):
                p = random_rank_projection(d, r, rng)
                for eta in (0.3, 0.85, 1.0):
                    for kind, state in ((W, werner_state(d, eta)), (S, isotropic_state(d, eta))):
                        cond = conditional_state(state, p).entries
                        block = p if kind is W else p.T
                        u_num = (cond @ block).trace().real / r
                        v_num = (cond @ (np.eye(d) - block)).trace().real / (d - r)
                        point = conditional_plane_point(StateFamily(kind, d), r, eta)
                        assert u_num == pytest.approx(point.u, abs=1e-13)
                        assert v_num == pytest.approx(point.v, abs=1e-13)

    def test_validation(self):
        family = StateFamily(W, 4)
        with pytest.raises(ValueError):
            conditional_plane_point(family, 3, 0.5)  # above floor(d/2)
        with pytest.raises(ValueError):
            conditional_plane_point(family, 0, 0.5)
        with pytest.raises(ValueError):
            conditional_plane_point(family, 1, 1.5)
        with pytest.raises(ValueError):
            StateFamily(W, 1)


class TestCriticalRadiusRank:
    def test_qutrit_values(self):
        assert critical_radius_rank(StateFamily(W, 3), 1) == pytest.approx(R2_W3, abs=1e-9)
        assert critical_radius_rank(StateFamily(S, 3), 1) == pytest.approx(R2_S3, abs=1e-9)

    def test_qubit_isotropic(self):
        assert critical_radius_rank(StateFamily(S, 2), 1) == pytest.approx(0.5, abs=1e-10)

    def test_matches_closed_form_for_rank_one(self):
        for kind in (W, S):
            for d in range(2, 13):
                family = StateFamily(kind, d)
                assert abs(critical_radius_rank(family, 1) - closed_form_r2(family)) < 1e-8

    def test_bracket_monotonicity(self):
        for kind, d, r in ((W, 3, 1), (S, 3, 1), (S, 6, 2)):
            family = StateFamily(kind, d)
            eta = critical_radius_rank(family, r)
            body = MomentBody(d, r)
            assert contains(body, conditional_plane_point(family, r, eta - 1e-6))
            assert not contains(body, conditional_plane_point(family, r, eta + 1e-6))


class TestCriticalRadiusDichotomic:
    def test_qutrit_werner(self):
        result = critical_radius_dichotomic(StateFamily(W, 3))
        assert result.value == pytest.approx(R2_W3, abs=1e-9)
        assert result.achieving_rank == 1
        assert result.per_rank == ((1, result.value),)
        assert result.residual < 1e-10

    def test_d4_werner_prefers_rank_one(self):
        result = critical_radius_dichotomic(StateFamily(W, 4))
        assert result.achieving_rank == 1
        assert len(result.per_rank) == 2
        assert result.value == min(v for _, v in result.per_rank)

    def test_isotropic_d10_value(self):
        family = StateFamily(S, 10)
        result = critical_radius_dichotomic(family)
        expected = -math.expm1(-math.log(10.0) / 9.0)  # 1 - 10**(-1/9)
        assert result.value == pytest.approx(expected, abs=1e-9)
        assert result.achieving_rank == 1


class TestClosedFormsAndReferences:
    def test_two_qubit_values(self):
        assert closed_form_r2(StateFamily(W, 2)) == 0.5
        assert closed_form_r2(StateFamily(S, 2)) == 0.5

    def test_qutrit_values(self):
        assert closed_form_r2(StateFamily(W, 3)) == pytest.approx(R2_W3, abs=1e-15)
        assert closed_form_r2(StateFamily(S, 3)) == pytest.approx(R2_S3, abs=1e-15)

    def test_reference_thresholds(self):
        w3 = reference_thresholds(StateFamily(W, 3))
        assert w3.separability == pytest.approx(0.25, abs=1e-15)
        assert w3.projective == pytest.approx(2.0 / 3.0, abs=1e-15)
        s3 = reference_thresholds(StateFamily(S, 3))
        assert s3.separability == pytest.approx(0.25, abs=1e-15)
        assert s3.projective == pytest.approx(5.0 / 12.0, abs=1e-14)
        s2 = reference_thresholds(StateFamily(S, 2))
        assert s2.projective == pytest.approx(0.5, abs=1e-15)

    def test_two_qubit_collapse(self):
        for kind in (W, S):
            family = StateFamily(kind, 2)
            assert abs(closed_form_r2(family) - reference_thresholds(family).projective) < 1e-12

    def test_strict_gap_above_two_qubits(self):
        for kind in (W, S):
            for d in range(3, 51):
                family = StateFamily(kind, d)
                assert closed_form_r2(family) > reference_thresholds(family).projective


class TestHierarchy:
    def test_werner_qutrit_report(self):
        report = hierarchy_check(StateFamily(W, 3))
        assert report.satisfied
        assert report.r2 == pytest.approx(R2_W3, abs=1e-12)
        assert report.projective == pytest.approx(2.0 / 3.0, abs=1e-14)
        assert report.povm_lower_bound == pytest.approx(43.0 / 108.0, abs=1e-14)
        assert report.separability == pytest.approx(0.25, abs=1e-15)
        assert report.r2 >= report.projective >= report.povm_lower_bound
        assert "three-outcome" in report.note

    def test_isotropic_qutrit_report(self):
        report = hierarchy_check(StateFamily(S, 3))
        assert report.satisfied
        assert report.povm_lower_bound is None
        assert report.r2 > report.projective

    def test_two_qubit_note(self):
        report = hierarchy_check(StateFamily(W, 2))
        assert report.satisfied
        assert "collapse" in report.note


class TestVectorizedProfiles:
    def test_profile_matches_the_membership_solver(self):
        for kind in (W, S):
            for d in (4, 7, 10, 13):
                family = StateFamily(kind, d)
                profile = rank_radius_profile(family)
                assert profile.shape == (d // 2,)
                for r in range(1, d // 2 + 1):
                    assert abs(profile[r - 1] - critical_radius_rank(family, r)) < 1e-8

    def test_scan_shapes_and_minimality(self):
        for kind in (W, S):
            rows = rank_minimality_scan(kind, 30)
            assert [row.d for row in rows] == list(range(2, 31))
            for row in rows:
                assert len(row.per_rank) == row.d // 2
                assert row.achieving_rank == 1
                assert row.value == min(row.per_rank)
                assert row.value == row.per_rank[0]

    def test_rank_one_minimality_to_d100(self):
        for kind in (W, S):
            assert all(row.achieving_rank == 1 for row in rank_minimality_scan(kind, 100))

    def test_scan_validation(self):
        with pytest.raises(ValueError):
            rank_minimality_scan(W, 4, d_min=1)
        with pytest.raises(ValueError):
            rank_minimality_scan(W, 3, d_min=5)
