import math

import numpy as np
import pytest

from qsteer.criteria import (
    ChannelChoi,
    TwirlingFidelities,
    apply_channel_to_alice,
    degradation_radius,
    identity_choi,
    normalize_bob_marginal,
    steerability_upper_bound,
    twirling_fidelities,
)
from qsteer.qops import (
    BipartiteState,
    haar_unitary_sample,
    isotropic_state,
    marginal_b,
    swap_operator,
    werner_state,
)
from qsteer.radii import FamilyKind, StateFamily, closed_form_r2
from oracles import random_density, trace_norm


def random_normalized_state(d: int, rng: np.random.Generator) -> BipartiteState:
    raw = BipartiteState(random_density(d * d, rng), dimA=d, dimB=d)
    return normalize_bob_marginal(raw)


def product_noise(d: int) -> BipartiteState:
    return BipartiteState(np.eye(d * d) / d**2, dimA=d, dimB=d)


class TestNormalizeBobMarginal:
    def test_noop_when_already_mixed(self):
        state = isotropic_state(3, 0.6)
        out = normalize_bob_marginal(state)
        assert np.abs(out.entries - state.entries).max() < 1e-12

    def test_filters_a_pure_state_to_maximal_entanglement(self):
        psi = np.zeros(4)
        psi[0] = math.sqrt(0.8)
        psi[3] = math.sqrt(0.2)
        state = BipartiteState(np.outer(psi, psi), dimA=2, dimB=2)
        out = normalize_bob_marginal(state)
        assert np.abs(marginal_b(out) - np.eye(2) / 2).max() < 1e-10
        phi = np.zeros(4)
        phi[0] = phi[3] = 1.0 / math.sqrt(2)
        assert np.abs(out.entries - np.outer(phi, phi)).max() < 1e-10

    def test_rejects_singular_marginal(self):
        state = BipartiteState(np.diag([1.0, 0.0, 0.0, 0.0]), dimA=2, dimB=2)
        with pytest.raises(ValueError):
            normalize_bob_marginal(state)


class TestChannelChoi:
    def test_identity_channel_roundtrip(self):
        rng = np.random.default_rng(67)
        state = BipartiteState(random_density(6, rng), dimA=2, dimB=3)
        out = apply_channel_to_alice(identity_choi(2), state)
        assert np.abs(out - state.entries).max() < 1e-13

    def test_depolarizing_channel(self):
        d = 2
        p = 0.3
        # Choi of X -> p X + (1-p) Tr(X) 1/d.
        choi = p * identity_choi(d).matrix + (1 - p) * np.kron(np.eye(d), np.eye(d) / d)
        channel = ChannelChoi(dim_in=d, dim_out=d, matrix=choi)
        state = isotropic_state(d, 0.8)
        out = apply_channel_to_alice(channel, state)
        assert np.abs(out - isotropic_state(d, 0.8 * p).entries).max() < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelChoi(dim_in=2, dim_out=2, matrix=np.eye(3))
        with pytest.raises(ValueError):
            ChannelChoi(dim_in=2, dim_out=2, matrix=-np.eye(4))
        with pytest.raises(ValueError):
            ChannelChoi(dim_in=2, dim_out=2, matrix=2.0 * identity_choi(2).matrix)
        with pytest.raises(ValueError):
            apply_channel_to_alice(identity_choi(3), isotropic_state(2, 0.5))


class TestDegradationRadius:
    def test_self_degradation_reaches_one(self):
        rng = np.random.default_rng(71)
        rho = random_normalized_state(2, rng)
        result = degradation_radius(rho, rho)
        assert result.value >= 1.0 - 1e-6
        assert result.witness is not None

    def test_product_noise_cannot_produce_correlations(self):
        result = degradation_radius(isotropic_state(2, 1.0), product_noise(2))
        assert result.value <= 1e-6

    def test_depolarized_isotropic_target(self):
        result = degradation_radius(isotropic_state(3, 1.0), isotropic_state(3, 0.4))
        assert result.value >= 0.4 - 1e-6

    def test_witness_reproduces_the_mixture(self):
        rho = isotropic_state(3, 1.0)
        tau = isotropic_state(3, 0.4)
        tol = 1e-7
        result = degradation_radius(rho, tau, tol=tol)
        assert result.witness is not None
        mapped = apply_channel_to_alice(result.witness, tau)
        noise = product_noise(3).entries
        target = result.value * rho.entries + (1 - result.value) * noise
        assert trace_norm(mapped - target) < 10 * tol
        assert result.witness_residual < 10 * tol

    def test_monotone_under_tolerance(self):
        rho = isotropic_state(2, 1.0)
        tau = isotropic_state(2, 0.35)
        tol = 1e-5
        eta_tol = 1e-6
        loose = degradation_radius(rho, tau, tol=tol, eta_tol=eta_tol).value
        tight = degradation_radius(rho, tau, tol=1e-7, eta_tol=eta_tol).value
        # A residual budget of tol buys at most tol/slope extra eta, where the
        # slope is the Frobenius distance covered per unit of eta.
        slope = np.linalg.norm(rho.entries - product_noise(2).entries)
        assert loose <= tight + tol / slope + 2 * eta_tol
        assert loose >= tight - 2 * eta_tol

    def test_certifies_unsteerability_through_the_anchor(self):
        # A mildly noisy isotropic state is a degradation of the critical one,
        # so the lower bound on its dichotomic radius reaches 1.
        anchor = isotropic_state(3, closed_form_r2(StateFamily(FamilyKind.ISOTROPIC, 3)))
        rho = isotropic_state(3, 0.4)
        result = degradation_radius(rho, anchor)
        assert result.value >= 1.0 - 1e-6

    def test_input_validation(self):
        rng = np.random.default_rng(73)
        with pytest.raises(ValueError):
            degradation_radius(isotropic_state(2, 0.5), isotropic_state(3, 0.5))
        skewed = BipartiteState(random_density(4, rng), dimA=2, dimB=2)
        with pytest.raises(ValueError):
            degradation_radius(skewed, product_noise(2))


class TestTwirlingFidelities:
    def test_family_anchors(self):
        for d in (2, 3):
            assert twirling_fidelities(werner_state(d, 1.0)).f_w == pytest.approx(-1.0, abs=1e-12)
            assert twirling_fidelities(isotropic_state(d, 1.0)).f_s == pytest.approx(1.0, abs=1e-12)
            noise = twirling_fidelities(product_noise(d))
            assert noise.f_s == pytest.approx(1.0 / d**2, abs=1e-13)
            assert noise.f_w == pytest.approx(1.0 / d, abs=1e-13)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            TwirlingFidelities(f_s=1.5, f_w=0.0)
        with pytest.raises(ValueError):
            TwirlingFidelities(f_s=0.5, f_w=-2.0)
        with pytest.raises(ValueError):
            twirling_fidelities(BipartiteState(np.eye(6) / 6, dimA=2, dimB=3))

    def test_twirl_average_converges_to_the_werner_projection(self):
        rng = np.random.default_rng(79)
        d = 3
        rho = random_normalized_state(d, rng)
        f_w = twirling_fidelities(rho).f_w
        # Exact projection onto span{1, F} with the same trace and swap overlap.
        f = swap_operator(d).entries
        alpha = (d - f_w) / (d * (d**2 - 1))
        beta = (d * f_w - 1) / (d * (d**2 - 1))
        projected = alpha * np.eye(d * d) + beta * f
        n = 1000
        average = np.zeros((d * d, d * d), dtype=complex)
        for _ in range(n):
            u = haar_unitary_sample(d, rng)
            uu = np.kron(u, u)
            average += uu @ rho.entries @ uu.conj().T
        average /= n
        assert twirling_fidelities(
            BipartiteState(average, dimA=d, dimB=d)
        ).f_w == pytest.approx(f_w, abs=1e-10)
        assert np.abs(average - projected).max() < 0.05


class TestUpperBound:
    def test_tight_on_the_werner_family(self):
        for d in range(2, 6):
            r2_w = closed_form_r2(StateFamily(FamilyKind.WERNER, d))
            r2_s = closed_form_r2(StateFamily(FamilyKind.ISOTROPIC, d))
            bound = steerability_upper_bound(werner_state(d, 1.0), r2_w, r2_s)
            assert abs(bound - r2_w) < 1e-12

    def test_tight_along_the_werner_ray(self):
        d = 3
        r2_w = closed_form_r2(StateFamily(FamilyKind.WERNER, d))
        r2_s = closed_form_r2(StateFamily(FamilyKind.ISOTROPIC, d))
        for eta in (0.8, 0.9, 1.0):
            bound = steerability_upper_bound(werner_state(d, eta), r2_w, r2_s)
            assert bound == pytest.approx(r2_w / eta, abs=1e-12)

    def test_tight_on_the_isotropic_family(self):
        for d in (2, 3):
            r2_w = closed_form_r2(StateFamily(FamilyKind.WERNER, d))
            r2_s = closed_form_r2(StateFamily(FamilyKind.ISOTROPIC, d))
            bound = steerability_upper_bound(isotropic_state(d, 1.0), r2_w, r2_s)
            assert bound == pytest.approx(r2_s, abs=1e-12)

    def test_both_branches_vacuous_on_product_noise(self):
        # F_W = 1/d and F_S = 1/d^2 sit exactly at the noise point, where
        # neither twirl direction yields a bound.  d = 2 keeps both
        # denominators exactly zero in floating point.
        bound = steerability_upper_bound(product_noise(2), 0.7, 0.4)
        assert bound == math.inf

    def test_printed_denominator_variant(self):
        d = 3
        rho = isotropic_state(d, 1.0)
        r2_w = closed_form_r2(StateFamily(FamilyKind.WERNER, d))
        r2_s = closed_form_r2(StateFamily(FamilyKind.ISOTROPIC, d))
        printed = steerability_upper_bound(rho, r2_w, r2_s, iso_denominator_printed=True)
        assert printed == pytest.approx(8.0 * r2_s / 7.0, abs=1e-12)
        # The printed variant stays finite on product noise through its
        # always-positive denominator.
        noise_bound = steerability_upper_bound(
            product_noise(d), r2_w, r2_s, iso_denominator_printed=True
        )
        expected = (d**2 - 1) * r2_s / (d**2 - 1.0 / d**2 - 1)
        assert noise_bound == pytest.approx(expected, abs=1e-12)
