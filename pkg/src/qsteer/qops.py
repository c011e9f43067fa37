"""Finite-dimensional quantum linear algebra.

States, measurement effects, partial traces, Haar sampling, and the
Werner/isotropic state families, over dense complex matrices.  All values
are immutable after construction and every operation is a pure function of
its inputs; randomized operations take an explicit ``numpy.random.Generator``
(use ``rng.spawn(k)`` to derive independent streams for parallel work).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "HermitianOperator",
    "DensityMatrix",
    "Projection",
    "Povm",
    "WeightedProjection",
    "BipartiteState",
    "werner_state",
    "isotropic_state",
    "conditional_state",
    "canonical_povm",
    "haar_state_sample",
    "haar_state_samples",
    "haar_unitary_sample",
    "swap_operator",
    "max_entangled_projector",
    "marginal_a",
    "marginal_b",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances: structural checks vs exact algebraic identities."""

    structural: float = 1e-10
    algebraic: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()


def _as_square_complex(entries) -> np.ndarray:
    mat = np.array(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if mat.shape[0] < 1:
        raise ValueError("matrix must be at least 1x1")
    mat.flags.writeable = False
    return mat


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix; hermiticity enforced at construction."""

    entries: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_square_complex(self.entries))
        dev = np.abs(self.entries - self.entries.conj().T).max()
        if dev > self.tol.algebraic:
            raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(self.entries.trace().real)


@dataclass(frozen=True, eq=False)
class DensityMatrix(HermitianOperator):
    """Hermitian, unit-trace, positive semidefinite within tolerance."""

    def __post_init__(self):
        super().__post_init__()
        tr = self.entries.trace()
        if abs(tr - 1.0) > self.tol.algebraic:
            raise ValueError(f"trace must equal 1 (got {tr})")
        lam_min = np.linalg.eigvalsh(self.entries)[0]
        if lam_min < -self.tol.algebraic:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lam_min:.3e})")


@dataclass(frozen=True, eq=False)
class Projection(HermitianOperator):
    """Orthogonal projection of known rank r, with 1 <= r <= dim - 1."""

    rank: int = 1

    def __post_init__(self):
        super().__post_init__()
        if not 1 <= self.rank <= self.dim - 1:
            raise ValueError(f"rank must lie in [1, {self.dim - 1}], got {self.rank}")
        idem = np.abs(self.entries @ self.entries - self.entries).max()
        if idem > self.tol.structural:
            raise ValueError(f"matrix is not idempotent (deviation {idem:.3e})")
        tr = self.entries.trace().real
        if abs(tr - self.rank) > self.tol.structural:
            raise ValueError(f"trace {tr} does not match rank {self.rank}")


@dataclass(frozen=True)
class WeightedProjection:
    """One canonical-form effect: weight alpha times a rank-1 projection."""

    weight: float
    vector: np.ndarray
    origin: int = 0  # index of the coarse effect this refines

    @property
    def projection(self) -> Projection:
        return Projection(np.outer(self.vector, self.vector.conj()), rank=1)


@dataclass(frozen=True, eq=False)
class Povm:
    """POVM in canonical rank-1 form: effects alpha_a P_a with sum alpha_a = d.

    Each weight lies in [0, 1] (an effect never exceeds the identity) and
    ``vectors[a]`` is the unit vector of P_a; ``origins[a]`` records which
    input effect the rank-1 piece was refined from.
    """

    dim: int
    weights: np.ndarray
    vectors: np.ndarray
    origins: tuple[int, ...]
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        vectors = np.array(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[1] != self.dim:
            raise ValueError(f"vectors must have shape (n, {self.dim})")
        if weights.shape != (vectors.shape[0],):
            raise ValueError("one weight per vector is required")
        if len(self.origins) != vectors.shape[0]:
            raise ValueError("one origin index per effect is required")
        if np.any(weights < -self.tol.structural) or np.any(weights > 1.0 + self.tol.structural):
            raise ValueError("weights must lie in [0, 1]")
        norms = np.linalg.norm(vectors, axis=1)
        if np.abs(norms - 1.0).max() > self.tol.structural:
            raise ValueError("effect vectors must be normalized")
        total = np.einsum("a,ai,aj->ij", weights, vectors, vectors.conj())
        dev = np.abs(total - np.eye(self.dim)).max()
        if dev > self.tol.structural:
            raise ValueError(f"effects do not sum to the identity (deviation {dev:.3e})")
        if abs(weights.sum() - self.dim) > self.tol.structural:
            raise ValueError(f"weights must sum to d = {self.dim} (got {weights.sum()})")
        weights.flags.writeable = False
        vectors.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "origins", tuple(int(k) for k in self.origins))

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def effects(self) -> list[WeightedProjection]:
        return [
            WeightedProjection(float(w), v, origin)
            for w, v, origin in zip(self.weights, self.vectors, self.origins)
        ]

    def effect_matrix(self, a: int) -> np.ndarray:
        """Dense matrix alpha_a P_a of effect a."""
        v = self.vectors[a]
        return self.weights[a] * np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class BipartiteState(DensityMatrix):
    """Density matrix on C^dimA x C^dimB."""

    dimA: int = 0
    dimB: int = 0

    def __post_init__(self):
        super().__post_init__()
        if self.dimA < 1 or self.dimB < 1:
            raise ValueError("both local dimensions must be positive")
        if self.dimA * self.dimB != self.dim:
            raise ValueError(
                f"joint dimension {self.dim} does not factor as {self.dimA} x {self.dimB}"
            )


def swap_operator(d: int) -> HermitianOperator:
    """Swap F on C^d x C^d, acting as F|ij> = |ji>."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return HermitianOperator(f)


def max_entangled_projector(d: int) -> DensityMatrix:
    """Projector onto the maximally entangled state sum_k |kk>/sqrt(d)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    phi = np.zeros(d * d)
    phi[:: d + 1] = 1.0 / math.sqrt(d)
    return DensityMatrix(np.outer(phi, phi))


def _check_mixing(eta: float) -> float:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {eta}")
    return float(eta)


def werner_state(d: int, eta: float) -> BipartiteState:
    """Werner state: antisymmetric projector mixed with white noise.

    Returns eta * 2 pi_minus / (d^2 - d) + (1 - eta) * (1/d) x (1/d); both
    marginals equal 1/d for every eta.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    eta = _check_mixing(eta)
    f = swap_operator(d).entries.real
    pi_minus = (np.eye(d * d) - f) / 2.0
    pure_part = 2.0 * pi_minus / (d * d - d)
    rho = eta * pure_part + (1.0 - eta) * np.eye(d * d) / d**2
    return BipartiteState(rho, dimA=d, dimB=d)


def isotropic_state(d: int, eta: float) -> BipartiteState:
    """Isotropic state: maximally entangled projector mixed with white noise."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    eta = _check_mixing(eta)
    s = max_entangled_projector(d).entries.real
    rho = eta * s + (1.0 - eta) * np.eye(d * d) / d**2
    return BipartiteState(rho, dimA=d, dimB=d)


def _effect_entries(effect, dim: int, tol: Tolerances) -> np.ndarray:
    mat = effect.entries if isinstance(effect, HermitianOperator) else np.asarray(effect, dtype=complex)
    if mat.shape != (dim, dim):
        raise ValueError(f"effect has shape {mat.shape}, expected ({dim}, {dim})")
    eigs = np.linalg.eigvalsh(mat)
    if eigs[0] < -tol.structural or eigs[-1] > 1.0 + tol.structural:
        raise ValueError("effect must satisfy 0 <= E <= 1")
    return mat


def conditional_state(rho: BipartiteState, effect) -> HermitianOperator:
    """Unnormalized conditional state Tr_A[rho (E x 1)] on Bob's side."""
    e = _effect_entries(effect, rho.dimA, rho.tol)
    rho4 = rho.entries.reshape(rho.dimA, rho.dimB, rho.dimA, rho.dimB)
    cond = np.einsum("abcd,ca->bd", rho4, e)
    return HermitianOperator(cond)


def marginal_a(rho: BipartiteState) -> np.ndarray:
    """Reduced state on A."""
    rho4 = rho.entries.reshape(rho.dimA, rho.dimB, rho.dimA, rho.dimB)
    return np.einsum("abcb->ac", rho4)


def marginal_b(rho: BipartiteState) -> np.ndarray:
    """Reduced state on B."""
    rho4 = rho.entries.reshape(rho.dimA, rho.dimB, rho.dimA, rho.dimB)
    return np.einsum("abad->bd", rho4)


def canonical_povm(effects, tol: Tolerances = DEFAULT_TOLERANCES) -> Povm:
    """Refine a POVM into weighted rank-1 projections with sum alpha_a = d.

    Each effect is spectrally decomposed; eigenvalues below 1e-12 are
    discarded and the surviving weights rescaled so they sum to d exactly.
    The conditional states of the refinement coarse-grain back to those of
    the input (track ``origins`` to undo the refinement).
    """
    mats = []
    for e in effects:
        mat = e.entries if isinstance(e, HermitianOperator) else np.asarray(e, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("every effect must be a square matrix")
        mats.append(mat)
    if not mats:
        raise ValueError("at least one effect is required")
    dim = mats[0].shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for mat in mats:
        if mat.shape != (dim, dim):
            raise ValueError("all effects must share one dimension")
        if np.abs(mat - mat.conj().T).max() > tol.structural:
            raise ValueError("effects must be Hermitian")
        total += mat
    if np.abs(total - np.eye(dim)).max() > tol.structural:
        raise ValueError("effects must sum to the identity")

    weights: list[float] = []
    vectors: list[np.ndarray] = []
    origins: list[int] = []
    for k, mat in enumerate(mats):
        vals, vecs = np.linalg.eigh(mat)
        if vals[0] < -tol.structural:
            raise ValueError(f"effect {k} is not positive semidefinite (min eigenvalue {vals[0]:.3e})")
        for lam, v in zip(vals, vecs.T):
            if lam > 1e-12:
                weights.append(float(lam))
                vectors.append(v)
                origins.append(k)
    w = np.array(weights)
    w *= dim / w.sum()
    return Povm(dim=dim, weights=w, vectors=np.array(vectors), origins=tuple(origins), tol=tol)


def haar_state_sample(d: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-random unit vector in C^d."""
    return haar_state_samples(d, 1, rng)[0]


def haar_state_samples(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n Haar-random unit vectors, shape (n, d).

    Normalized complex Gaussians are unitarily invariant, which is the
    defining property of the Haar measure on pure states.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_unitary_sample(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases
