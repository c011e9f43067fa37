import math

import numpy as np
import pytest

from qsteer.lhs import (
    MonteCarlo,
    Quadrature,
    ResponseModel,
    assemblage_deviation_sigmas,
    povm_lower_bound_werner,
    realized_eta,
    reconstruct_assemblage,
    response,
    response_from_overlaps,
)
from qsteer.qops import canonical_povm, conditional_state, haar_state_samples, werner_state
from oracles import random_povm_effects


def basis_povm(d: int):
    return canonical_povm([np.diag([1.0 if i == k else 0.0 for i in range(d)]) for k in range(d)])


def random_model(d: int, rng: np.random.Generator, n_effects: int | None = None) -> ResponseModel:
    n = n_effects if n_effects is not None else int(rng.integers(2, d + 2))
    return ResponseModel(povm=canonical_povm(random_povm_effects(d, n, rng)), d=d)


class TestResponse:
    def test_normalization_and_range_randomized(self):
        rng = np.random.default_rng(51)
        for d in (2, 3, 4):
            for _ in range(5):
                model = random_model(d, rng)
                states = haar_state_samples(d, 400, rng)
                amps = states @ model.povm.vectors.conj().T
                g = response_from_overlaps(model.povm.weights, np.abs(amps) ** 2, d)
                assert np.abs(g.sum(axis=1) - 1.0).max() < 1e-12
                assert g.min() >= 0.0
                assert g.max() <= 1.0

    def test_basis_measurement_closed_values(self):
        # Basis POVM at d=3 with the hidden state |0>: the aligned outcome is
        # suppressed entirely and the two orthogonal ones split evenly.
        model = ResponseModel(povm=basis_povm(3), d=3)
        lam = np.array([1.0, 0.0, 0.0])
        g = response(model, lam)
        aligned = int(np.argmax([abs(v[0]) for v in model.povm.vectors]))
        expected = np.full(3, 0.5)
        expected[aligned] = 0.0
        assert np.abs(np.sort(g) - np.sort(expected)).max() < 1e-14
        assert g[aligned] == 0.0
        assert g.sum() == pytest.approx(1.0, abs=1e-15)

    def test_boundary_cutoff_is_closed(self):
        # Overlap exactly 1/d counts as active; nudging it above flips the
        # first term off, and the difference survives the bracket reshuffle.
        d = 3
        weights = np.array([1.0, 1.0, 1.0])
        at_boundary = np.array([1.0 / 3.0, 2.0 / 3.0, 0.0])
        above = at_boundary.copy()
        above[0] = np.nextafter(1.0 / 3.0, 1.0)
        g_boundary = response_from_overlaps(weights, at_boundary, d)
        g_above = response_from_overlaps(weights, above, d)
        first_term = (1.0 - 1.0 / 3.0) / (d - 1.0)
        assert g_boundary[0] - g_above[0] == pytest.approx(first_term * (1.0 - 1.0 / d), abs=1e-12)
        for g in (g_boundary, g_above):
            assert g.sum() == pytest.approx(1.0, abs=1e-15)

    def test_input_validation(self):
        model = ResponseModel(povm=basis_povm(2), d=2)
        with pytest.raises(ValueError):
            response(model, np.array([1.0, 1.0]))  # not normalized
        with pytest.raises(ValueError):
            response(model, np.array([1.0, 0.0, 0.0]))  # wrong dimension
        with pytest.raises(ValueError):
            ResponseModel(povm=basis_povm(2), d=3)


class TestLowerBound:
    def test_small_dimensions_exact_fractions(self):
        assert povm_lower_bound_werner(2) == pytest.approx(5.0 / 12.0, abs=1e-15)
        assert povm_lower_bound_werner(3) == pytest.approx(43.0 / 108.0, abs=1e-15)

    def test_large_d_limit(self):
        assert abs(povm_lower_bound_werner(10_000) - 1.0 / math.e) < 1e-4
        assert abs(povm_lower_bound_werner(10**6) - 1.0 / math.e) < 1e-6

    def test_validation(self):
        with pytest.raises(ValueError):
            povm_lower_bound_werner(1)


class TestRealizedEta:
    def test_matches_the_closed_form_bound(self):
        for d in range(2, 21):
            model = ResponseModel(povm=basis_povm(d), d=d)
            assert abs(realized_eta(model, 0) - povm_lower_bound_werner(d)) < 1e-10

    def test_outcome_independence(self):
        rng = np.random.default_rng(53)
        model = random_model(3, rng)
        values = [realized_eta(model, a) for a in range(len(model.povm))]
        assert max(values) - min(values) < 1e-12

    def test_outcome_index_validation(self):
        model = ResponseModel(povm=basis_povm(2), d=2)
        with pytest.raises(ValueError):
            realized_eta(model, 7)


class TestReconstruction:
    def test_monte_carlo_matches_werner_conditionals_d2(self):
        rng = np.random.default_rng(57)
        model = ResponseModel(povm=basis_povm(2), d=2)
        eta = povm_lower_bound_werner(2)
        state = werner_state(2, eta)
        estimate = reconstruct_assemblage(model, MonteCarlo(n_samples=200_000, rng=rng))
        targets = [conditional_state(state, model.povm.effect_matrix(a)) for a in range(len(model.povm))]
        assert estimate.frobenius_se is not None
        assert assemblage_deviation_sigmas(estimate, targets).max() < 5.0

    def test_monte_carlo_matches_werner_conditionals_d3_random_povm(self):
        rng = np.random.default_rng(59)
        model = random_model(3, rng, n_effects=3)
        eta = povm_lower_bound_werner(3)
        state = werner_state(3, eta)
        estimate = reconstruct_assemblage(model, MonteCarlo(n_samples=200_000, rng=rng))
        targets = [conditional_state(state, model.povm.effect_matrix(a)) for a in range(len(model.povm))]
        assert assemblage_deviation_sigmas(estimate, targets).max() < 5.0

    def test_quadrature_matches_werner_conditionals_d2(self):
        rng = np.random.default_rng(61)
        model = random_model(2, rng, n_effects=3)
        eta = povm_lower_bound_werner(2)
        state = werner_state(2, eta)
        estimate = reconstruct_assemblage(model, Quadrature(order=256))
        for a, op in enumerate(estimate.operators):
            target = conditional_state(state, model.povm.effect_matrix(a)).entries
            assert np.abs(op.entries - target).max() < 1e-4

    def test_coarse_graining_through_the_refinement(self):
        # Dichotomic projective measurement, refined to rank-1 form: summing
        # the reconstructed refined conditionals per origin reproduces the
        # coarse Werner conditionals.
        rng = np.random.default_rng(63)
        p = np.diag([1.0, 0.0, 0.0])
        effects = [p, np.eye(3) - p]
        povm = canonical_povm(effects)
        model = ResponseModel(povm=povm, d=3)
        eta = povm_lower_bound_werner(3)
        state = werner_state(3, eta)
        estimate = reconstruct_assemblage(model, MonteCarlo(n_samples=200_000, rng=rng))
        for k, effect in enumerate(effects):
            members = [a for a in range(len(povm)) if povm.origins[a] == k]
            got = sum(estimate.operators[a].entries for a in members)
            want = conditional_state(state, effect).entries
            budget = 5.0 * math.sqrt(3) * sum(estimate.frobenius_se[a] for a in members)
            delta = got - want
            assert np.abs(np.linalg.eigvalsh(delta)).sum() < budget

    def test_method_validation(self):
        model = ResponseModel(povm=basis_povm(3), d=3)
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError):
            reconstruct_assemblage(model, MonteCarlo(n_samples=1, rng=rng))
        with pytest.raises(ValueError):
            reconstruct_assemblage(model, Quadrature(order=3))
        with pytest.raises(ValueError):
            reconstruct_assemblage(model, Quadrature(order=64))  # d != 2
        with pytest.raises(TypeError):
            reconstruct_assemblage(model, "quadrature")

    def test_sigma_units_require_monte_carlo(self):
        model = ResponseModel(povm=basis_povm(2), d=2)
        estimate = reconstruct_assemblage(model, Quadrature(order=16))
        with pytest.raises(ValueError):
            assemblage_deviation_sigmas(estimate, [np.eye(2)] * len(model.povm))
