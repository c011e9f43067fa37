"""Self-test suite run by the ``verify`` CLI command.

Each check exercises one documented invariant with explicit randomness and
reports the measured residual next to its threshold, so a failing run
pinpoints the broken property rather than just exiting nonzero.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import capacity, lhs, qops, radii

__all__ = ["CheckResult", "VerificationReport", "run_verification"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    samples: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


def _check(name: str, measured: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(measured <= threshold), float(measured), float(threshold), detail)


def _marginals_check() -> CheckResult:
    worst = 0.0
    for d in range(2, 6):
        for state in (qops.werner_state(d, 0.7), qops.isotropic_state(d, 0.7)):
            eye = np.eye(d) / d
            worst = max(worst, np.abs(qops.marginal_a(state) - eye).max())
            worst = max(worst, np.abs(qops.marginal_b(state) - eye).max())
    return _check("state-family marginals are maximally mixed", worst, 1e-12)


def _covariance_check(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for d in range(2, 5):
        u = qops.haar_unitary_sample(d, rng)
        w = qops.werner_state(d, 0.63).entries
        s = qops.isotropic_state(d, 0.63).entries
        uu = np.kron(u, u)
        worst = max(worst, np.abs(uu @ w @ uu.conj().T - w).max())
        us = np.kron(u, u.conj())
        worst = max(worst, np.abs(us @ s @ us.conj().T - s).max())
    return _check("local-unitary covariance of the families", worst, 1e-10)


def _conditional_linearity_check(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for d in (2, 3):
        state = qops.isotropic_state(d, 0.4)
        herm = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        herm = herm + herm.conj().T
        lo, hi = np.linalg.eigvalsh(herm)[[0, -1]]
        effect = (herm - lo * np.eye(d)) / (hi - lo)
        total = (
            qops.conditional_state(state, effect).entries
            + qops.conditional_state(state, np.eye(d) - effect).entries
        )
        worst = max(worst, np.abs(total - qops.marginal_b(state)).max())
    return _check("conditional states are linear and complete", worst, 1e-12)


def _haar_overlap_law_check(rng: np.random.Generator, samples: int) -> CheckResult:
    from scipy import stats

    worst = 0.0
    for d, r in ((2, 1), (4, 2)):
        states = qops.haar_state_samples(d, samples, rng)
        t = (np.abs(states[:, :r]) ** 2).sum(axis=1)
        ks = stats.kstest(t, stats.beta(r, d - r).cdf).statistic
        worst = max(worst, ks)
    threshold = max(0.01, 1.63 / math.sqrt(samples))
    return _check("Haar overlap follows the Beta(r, d-r) law (KS)", worst, threshold)


def _capacity_boundary_check() -> CheckResult:
    worst = 0.0
    for d, r in ((3, 1), (4, 2), (5, 2)):
        body = capacity.MomentBody(d, r)
        for c in (0.1, 0.3, 0.6):
            p = capacity.threshold_point_lower(body, c)
            if not capacity.contains(body, p):
                worst = max(worst, 1.0)
            outside = capacity.PlanePoint(p.u, p.v + 1e-6)
            if capacity.contains(body, outside):
                worst = max(worst, 1.0)
            comp = capacity.PlanePoint(1.0 / d - p.u, 1.0 / d - p.v)
            if not capacity.contains(body, comp):
                worst = max(worst, 1.0)
    return _check("capacity boundary and complement symmetry", worst, 0.5, "1.0 marks a failed membership")


def _capacity_monte_carlo_check(rng: np.random.Generator, samples: int) -> CheckResult:
    d, r, c = 3, 1, 0.35
    body = capacity.MomentBody(d, r)
    p = capacity.threshold_point_lower(body, c)
    states = qops.haar_state_samples(d, samples, rng)
    t = np.abs(states[:, 0]) ** 2
    g = t <= c
    u_samples = g * t / r
    v_samples = g * (1.0 - t) / (d - r)
    z_u = abs(u_samples.mean() - p.u) / max(u_samples.std(ddof=1) / math.sqrt(samples), 1e-300)
    z_v = abs(v_samples.mean() - p.v) / max(v_samples.std(ddof=1) / math.sqrt(samples), 1e-300)
    return _check("capacity threshold point matches Haar Monte Carlo", max(z_u, z_v), 3.0, "z-score")


def _solver_closed_form_check() -> CheckResult:
    worst = 0.0
    for kind in radii.FamilyKind:
        for d in range(2, 13):
            family = radii.StateFamily(kind, d)
            worst = max(
                worst, abs(radii.critical_radius_rank(family, 1) - radii.closed_form_r2(family))
            )
    return _check("rank-1 solver agrees with the closed forms", worst, 1e-8)


def _qubit_collapse_check() -> CheckResult:
    worst = 0.0
    for kind in radii.FamilyKind:
        family = radii.StateFamily(kind, 2)
        worst = max(
            worst,
            abs(radii.closed_form_r2(family) - radii.reference_thresholds(family).projective),
        )
    return _check("two-qubit dichotomic and projective radii coincide", worst, 1e-12)


def _strict_gap_check() -> CheckResult:
    worst_margin = math.inf
    for kind in radii.FamilyKind:
        for d in range(3, 41):
            family = radii.StateFamily(kind, d)
            gap = radii.closed_form_r2(family) - radii.reference_thresholds(family).projective
            worst_margin = min(worst_margin, gap)
    return _check(
        "dichotomic radius strictly exceeds projective for d >= 3",
        -worst_margin,
        -1e-12,
        f"smallest gap {worst_margin:.3e}",
    )


def _rank_minimality_check() -> CheckResult:
    bad = 0
    for kind in radii.FamilyKind:
        for row in radii.rank_minimality_scan(kind, 100):
            if row.achieving_rank != 1:
                bad += 1
    return _check("per-rank radius is minimized at rank 1 (d <= 100)", float(bad), 0.0)


def _response_check(rng: np.random.Generator, samples: int) -> CheckResult:
    worst_norm = 0.0
    violations = 0
    n_models = max(10, samples // 2000)
    for _ in range(n_models):
        d = int(rng.integers(2, 5))
        povm = _random_canonical_povm(d, rng)
        states = qops.haar_state_samples(d, 200, rng)
        amps = states @ povm.vectors.conj().T
        g = lhs.response_from_overlaps(povm.weights, np.abs(amps) ** 2, d)
        worst_norm = max(worst_norm, np.abs(g.sum(axis=1) - 1.0).max())
        violations += int(((g < 0.0) | (g > 1.0)).sum())
    measured = max(worst_norm, float(violations))
    return _check("response probabilities normalize and stay in [0, 1]", measured, 1e-12)


def _realized_eta_check() -> CheckResult:
    worst = 0.0
    for d in range(2, 13):
        povm = _basis_povm(d)
        model = lhs.ResponseModel(povm=povm, d=d)
        worst = max(worst, abs(lhs.realized_eta(model, 0) - lhs.povm_lower_bound_werner(d)))
    return _check("analytic model parameter matches the closed-form bound", worst, 1e-10)


def _assemblage_check(rng: np.random.Generator, samples: int) -> CheckResult:
    d = 2
    povm = _random_canonical_povm(d, rng)
    model = lhs.ResponseModel(povm=povm, d=d)
    eta = lhs.povm_lower_bound_werner(d)
    state = qops.werner_state(d, eta)
    estimate = lhs.reconstruct_assemblage(model, lhs.MonteCarlo(n_samples=max(samples, 10_000), rng=rng))
    targets = [qops.conditional_state(state, povm.effect_matrix(a)) for a in range(len(povm))]
    sigmas = lhs.assemblage_deviation_sigmas(estimate, targets)
    return _check("reconstructed assemblage matches the Werner conditionals", float(sigmas.max()), 5.0, "sigma units")


def _random_canonical_povm(d: int, rng: np.random.Generator) -> qops.Povm:
    n = int(rng.integers(2, d + 2))
    raw = []
    for _ in range(n):
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        raw.append(z @ z.conj().T)
    total = sum(raw)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    effects = [inv_sqrt @ m @ inv_sqrt for m in raw]
    return qops.canonical_povm(effects)


def _basis_povm(d: int) -> qops.Povm:
    return qops.canonical_povm([np.diag([1.0 if i == k else 0.0 for i in range(d)]) for k in range(d)])


def run_verification(seed: int = 0, samples: int = 100_000) -> VerificationReport:
    """Run every invariant check with one seeded random stream."""
    rng = np.random.default_rng(seed)
    checks = (
        _marginals_check(),
        _covariance_check(rng),
        _conditional_linearity_check(rng),
        _haar_overlap_law_check(rng, samples),
        _capacity_boundary_check(),
        _capacity_monte_carlo_check(rng, samples),
        _solver_closed_form_check(),
        _qubit_collapse_check(),
        _strict_gap_check(),
        _rank_minimality_check(),
        _response_check(rng, samples),
        _realized_eta_check(),
        _assemblage_check(rng, samples),
    )
    return VerificationReport(seed=seed, samples=samples, checks=checks)
