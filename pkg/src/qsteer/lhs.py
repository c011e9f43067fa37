"""Local hidden state model for arbitrary POVMs on Werner states.

The hidden variable is a Haar-distributed pure state |l> on Bob's side.
For a canonical POVM with effects alpha_a P_a (P_a rank-1, sum alpha_a = d),
the announced-outcome probabilities are

    G_a(l) = alpha_a <l|(1-P_a)/(d-1)|l> 1{<l|P_a|l> <= 1/d}
           + (alpha_a/d) [1 - sum_b alpha_b <l|(1-P_b)/(d-1)|l> 1{<l|P_b|l> <= 1/d}]

with the closed cutoff 1{0 <= 0} = 1 (the boundary overlap set has Haar
measure zero, so the convention only fixes determinism).  Normalization
sum_a G_a = 1 is an algebraic identity via sum_a alpha_a = d.  The model
reproduces the Werner-state assemblage at the mixing parameter given by
``povm_lower_bound_werner``; ``reconstruct_assemblage`` verifies this
numerically and ``realized_eta`` extracts the parameter analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import MomentBody, threshold_point_lower
from .qops import HermitianOperator, Povm, haar_state_samples

__all__ = [
    "ResponseModel",
    "MonteCarlo",
    "Quadrature",
    "AssemblageEstimate",
    "response",
    "response_from_overlaps",
    "povm_lower_bound_werner",
    "realized_eta",
    "realized_eta_value",
    "reconstruct_assemblage",
    "assemblage_deviation_sigmas",
]


@dataclass(frozen=True)
class ResponseModel:
    """A canonical rank-1 POVM together with its hidden-state dimension."""

    povm: Povm
    d: int

    def __post_init__(self):
        if self.povm.dim != self.d:
            raise ValueError(f"POVM dimension {self.povm.dim} does not match d={self.d}")
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")


def response_from_overlaps(weights: np.ndarray, overlaps: np.ndarray, d: int) -> np.ndarray:
    """Outcome probabilities G_a from precomputed overlaps t_a = <l|P_a|l>.

    ``overlaps`` may carry leading batch axes; the effect axis is last.
    The cutoff is the closed comparison t <= 1/d.
    """
    weights = np.asarray(weights, dtype=float)
    t = np.asarray(overlaps, dtype=float)
    active = t <= 1.0 / d
    first = weights * (1.0 - t) / (d - 1.0) * active
    bracket = 1.0 - first.sum(axis=-1, keepdims=True)
    return first + weights / d * bracket


def response(model: ResponseModel, lam: np.ndarray) -> np.ndarray:
    """Probability vector (G_a)_a announced for the hidden state ``lam``."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (model.d,):
        raise ValueError(f"hidden state must be a vector of dimension {model.d}")
    norm = np.linalg.norm(lam)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"hidden state must be normalized (norm {norm})")
    amps = model.povm.vectors.conj() @ lam
    overlaps = np.abs(amps) ** 2
    return response_from_overlaps(model.povm.weights, overlaps, model.d)


def povm_lower_bound_werner(d: int) -> float:
    """Mixing parameter at which the response model reproduces a Werner state.

    Equals [1 + (d-1)^(d+1) d^(-d)] / (d+1); tends to 1/e as d grows.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return (1.0 + math.exp((d + 1) * math.log(d - 1.0) - d * math.log(float(d)))) / (d + 1)


def realized_eta_value(d: int) -> float:
    """Analytic mixing parameter reproduced by the response model at dimension d.

    The first response term is a threshold response reweighted by
    (1-t)/(d-1); folding that weight into the Beta(1, d-1) overlap density
    raises its second parameter by one, so the term's moment coordinates are
    those of the rank-1 body one dimension up, evaluated at cutoff 1/d.
    Matching both eigenvalue blocks of the Werner conditional then gives
    eta = d*v' - (d-1)*u'.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    p = threshold_point_lower(MomentBody(d + 1, 1), 1.0 / d)
    return d * p.v - (d - 1) * p.u


def realized_eta(model: ResponseModel, a: int) -> float:
    """Mixing parameter whose Werner conditional the model realizes at outcome a.

    The weight alpha_a scales both sides of the match identically, so the
    result depends only on the dimension and is the same for every outcome;
    the index is validated and otherwise unused.
    """
    if not 0 <= a < len(model.povm):
        raise ValueError(f"outcome index {a} out of range for {len(model.povm)} effects")
    return realized_eta_value(model.d)


@dataclass(frozen=True)
class MonteCarlo:
    """Haar Monte-Carlo integration with an explicit random stream."""

    n_samples: int
    rng: np.random.Generator
    chunk: int = 200_000


@dataclass(frozen=True)
class Quadrature:
    """Product quadrature on the Bloch sphere; d = 2 only."""

    order: int


@dataclass(frozen=True)
class AssemblageEstimate:
    """Estimated conditional operators, one per outcome.

    ``frobenius_se`` is the per-outcome Monte-Carlo standard error of the
    whole matrix estimate in Frobenius norm (None for quadrature).
    """

    operators: tuple[HermitianOperator, ...]
    frobenius_se: tuple[float, ...] | None
    n_samples: int | None
    method: str


def _accumulate(model: ResponseModel, states: np.ndarray, node_weights: np.ndarray | None):
    # Returns (sum of w G_a |l><l|, sum of w G_a^2 |l_i|^2 |l_j|^2) per outcome.
    amps = states @ model.povm.vectors.conj().T
    g = response_from_overlaps(model.povm.weights, np.abs(amps) ** 2, model.d)
    if node_weights is not None:
        g = g * node_weights[:, None]
    first = np.einsum("na,ni,nj->aij", g.astype(complex), states, states.conj())
    abs2 = np.abs(states) ** 2
    second = np.einsum("na,ni,nj->aij", g**2, abs2, abs2)
    return first, second


def _monte_carlo_assemblage(model: ResponseModel, method: MonteCarlo) -> AssemblageEstimate:
    if method.n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {method.n_samples}")
    n = len(model.povm)
    d = model.d
    total = np.zeros((n, d, d), dtype=complex)
    total_sq = np.zeros((n, d, d))
    remaining = method.n_samples
    while remaining > 0:
        batch = min(remaining, method.chunk)
        states = haar_state_samples(d, batch, method.rng)
        first, second = _accumulate(model, states, None)
        total += first
        total_sq += second
        remaining -= batch
    mean = total / method.n_samples
    var = np.maximum(total_sq / method.n_samples - np.abs(mean) ** 2, 0.0)
    se = np.sqrt(var.sum(axis=(1, 2)) / method.n_samples)
    return AssemblageEstimate(
        operators=tuple(HermitianOperator(m) for m in mean),
        frobenius_se=tuple(float(s) for s in se),
        n_samples=method.n_samples,
        method="monte-carlo",
    )


def _bloch_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Legendre in cos(theta), uniform in phi; exact weights for the
    # normalized Haar measure on pure qubit states.
    cos_theta, w = np.polynomial.legendre.leggauss(order)
    m = 2 * order
    phi = 2.0 * np.pi * np.arange(m) / m
    half = np.arccos(cos_theta) / 2.0
    c, s = np.cos(half), np.sin(half)
    states = np.empty((order * m, 2), dtype=complex)
    states[:, 0] = np.repeat(c, m)
    states[:, 1] = (s[:, None] * np.exp(1j * phi)[None, :]).reshape(-1)
    weights = np.repeat(w / 2.0, m) / m
    return states, weights


def _quadrature_assemblage(model: ResponseModel, method: Quadrature) -> AssemblageEstimate:
    if model.d != 2:
        raise ValueError("quadrature integration is implemented for d = 2 only")
    if method.order < 4:
        raise ValueError(f"quadrature order must be >= 4, got {method.order}")
    states, weights = _bloch_nodes(method.order)
    first, _ = _accumulate(model, states, weights)
    return AssemblageEstimate(
        operators=tuple(HermitianOperator(m) for m in first),
        frobenius_se=None,
        n_samples=None,
        method="quadrature",
    )


def reconstruct_assemblage(model: ResponseModel, method: MonteCarlo | Quadrature) -> AssemblageEstimate:
    """Estimate the model's conditional operators integral G_a(l) |l><l| dHaar."""
    if isinstance(method, MonteCarlo):
        return _monte_carlo_assemblage(model, method)
    if isinstance(method, Quadrature):
        return _quadrature_assemblage(model, method)
    raise TypeError(f"unsupported integration method: {method!r}")


def assemblage_deviation_sigmas(estimate: AssemblageEstimate, targets) -> np.ndarray:
    """Per-outcome trace-norm deviation from targets, in standard-error units.

    The yardstick is sqrt(d) times the Frobenius standard error, which
    dominates the trace norm of a d x d matrix fluctuation.
    """
    if estimate.frobenius_se is None:
        raise ValueError("deviation in sigma units requires a Monte-Carlo estimate")
    out = []
    for op, se, target in zip(estimate.operators, estimate.frobenius_se, targets):
        tmat = target.entries if isinstance(target, HermitianOperator) else np.asarray(target)
        delta = op.entries - tmat
        trace_norm = float(np.abs(np.linalg.eigvalsh(delta)).sum())
        out.append(trace_norm / (math.sqrt(op.dim) * max(se, 1e-300)))
    return np.array(out)
