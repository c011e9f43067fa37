"""Steerability criteria for general bipartite states.

Two complementary bounds around the family radii: a lower bound on the
critical radius of rho from the largest eta at which the noisy state
rho_eta can be produced from an unsteerable anchor tau by a local channel
on Alice's side (semidefinite feasibility, bisected over eta), and an
upper bound from twirling rho onto the Werner/isotropic families, which
preserves the swap and maximally-entangled fidelities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverConvergenceError
from .qops import (
    BipartiteState,
    marginal_b,
    max_entangled_projector,
    swap_operator,
)

__all__ = [
    "ChannelChoi",
    "TwirlingFidelities",
    "DegradationResult",
    "normalize_bob_marginal",
    "identity_choi",
    "apply_channel_to_alice",
    "degradation_radius",
    "twirling_fidelities",
    "steerability_upper_bound",
]

_CHOI_TOL = 1e-9
_MARGINAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ChannelChoi:
    """Choi matrix of a completely positive trace-preserving map.

    Basis ordering is (input, output): entry ((a, o), (a', o')) is the
    matrix element of E(|a><a'|) between output states |o>, |o'>.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        n = self.dim_in * self.dim_out
        if mat.shape != (n, n):
            raise ValueError(f"Choi matrix must have shape ({n}, {n}), got {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > _CHOI_TOL:
            raise ValueError("Choi matrix must be Hermitian")
        if np.linalg.eigvalsh(mat)[0] < -_CHOI_TOL:
            raise ValueError("Choi matrix must be positive semidefinite")
        c4 = mat.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)
        pt = np.einsum("aoco->ac", c4)
        if np.abs(pt - np.eye(self.dim_in)).max() > _CHOI_TOL:
            raise ValueError("partial trace over the output must be the identity")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class TwirlingFidelities:
    """Overlap with the maximally entangled state and the swap operator."""

    f_s: float
    f_w: float

    def __post_init__(self):
        if not -1e-9 <= self.f_s <= 1.0 + 1e-9:
            raise ValueError(f"f_s must lie in [0, 1], got {self.f_s}")
        if not -1.0 - 1e-9 <= self.f_w <= 1.0 + 1e-9:
            raise ValueError(f"f_w must lie in [-1, 1], got {self.f_w}")


def identity_choi(d: int) -> ChannelChoi:
    """Choi matrix of the identity channel on C^d."""
    mat = np.zeros((d * d, d * d))
    for a in range(d):
        for a2 in range(d):
            mat[a * d + a, a2 * d + a2] = 1.0
    return ChannelChoi(dim_in=d, dim_out=d, matrix=mat)


def apply_channel_to_alice(choi: ChannelChoi, state: BipartiteState) -> np.ndarray:
    """Matrix of (E x I)[state] for the channel E with the given Choi matrix."""
    if choi.dim_in != state.dimA:
        raise ValueError(
            f"channel input dimension {choi.dim_in} does not match Alice's dimension {state.dimA}"
        )
    c4 = choi.matrix.reshape(choi.dim_in, choi.dim_out, choi.dim_in, choi.dim_out)
    s4 = state.entries.reshape(state.dimA, state.dimB, state.dimA, state.dimB)
    out = np.einsum("aocp,abcd->obpd", c4, s4)
    n = choi.dim_out * state.dimB
    return out.reshape(n, n)


def normalize_bob_marginal(rho: BipartiteState) -> BipartiteState:
    """Local filtering on Bob's side that makes his marginal maximally mixed.

    Steerability from Alice to Bob is invariant under this operation, so the
    output carries the same classification as the input.  Requires a
    full-rank Bob marginal.
    """
    rb = marginal_b(rho)
    vals, vecs = np.linalg.eigh(rb)
    if vals[0] <= 1e-9:
        raise ValueError(f"Bob's marginal must be full rank (min eigenvalue {vals[0]:.3e})")
    k = vecs @ np.diag(1.0 / np.sqrt(vals * rho.dimB)) @ vecs.conj().T
    filt = np.kron(np.eye(rho.dimA), k)
    out = filt @ rho.entries @ filt.conj().T
    out /= out.trace().real
    return BipartiteState(out, dimA=rho.dimA, dimB=rho.dimB)


@dataclass(frozen=True)
class DegradationResult:
    """Largest feasible mixing parameter with the certifying channel."""

    value: float
    witness: ChannelChoi | None
    witness_residual: float
    solves: int


def _project_to_cptp(mat: np.ndarray, d_in: int, d_out: int, rounds: int = 3) -> np.ndarray:
    # Solver output sits within ~1e-8 of the CPTP set; a few alternating
    # eigenvalue clips and trace-preservation corrections move it inside
    # without changing the channel at the feasibility-tolerance scale.
    c = (mat + mat.conj().T) / 2.0
    for _ in range(rounds):
        vals, vecs = np.linalg.eigh(c)
        if vals[0] < 0.0:
            c = (vecs * np.maximum(vals, 1e-13)) @ vecs.conj().T
        c4 = c.reshape(d_in, d_out, d_in, d_out)
        delta = np.eye(d_in) - np.einsum("aoco->ac", c4)
        if np.abs(delta).max() < 1e-13 and vals[0] >= -1e-13:
            break
        c = c + np.kron(delta, np.eye(d_out) / d_out)
    return (c + c.conj().T) / 2.0


def _check_maximally_mixed_marginal(state: BipartiteState, name: str) -> None:
    dev = np.abs(marginal_b(state) - np.eye(state.dimB) / state.dimB).max()
    if dev > _MARGINAL_TOL:
        raise ValueError(
            f"{name} must have a maximally mixed Bob marginal "
            f"(deviation {dev:.3e}); apply normalize_bob_marginal first"
        )


def _degradation_program(rho: BipartiteState, tau: BipartiteState):
    import cvxpy as cp

    d_a, d_b = rho.dimA, rho.dimB
    choi = cp.Variable((d_a * d_a, d_a * d_a), hermitian=True)
    eta = cp.Parameter()
    tau4 = tau.entries.reshape(d_a, d_b, d_a, d_b)
    mapped = 0
    for a in range(d_a):
        for a2 in range(d_a):
            block = choi[a * d_a : (a + 1) * d_a, a2 * d_a : (a2 + 1) * d_a]
            mapped = mapped + cp.kron(block, cp.Constant(tau4[a, :, a2, :]))
    noise = np.kron(np.eye(d_a) / d_a, marginal_b(rho))
    target = eta * cp.Constant(rho.entries) + (1 - eta) * cp.Constant(noise)
    partial = cp.bmat(
        [
            [cp.trace(choi[a * d_a : (a + 1) * d_a, a2 * d_a : (a2 + 1) * d_a]) for a2 in range(d_a)]
            for a in range(d_a)
        ]
    )
    constraints = [choi >> 0, partial == np.eye(d_a)]
    problem = cp.Problem(cp.Minimize(cp.norm(mapped - target, "fro")), constraints)
    return problem, choi, eta


def _solve_feasibility(problem) -> float:
    import warnings

    import cvxpy as cp

    acceptable = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        status = None
        try:
            problem.solve(solver="CLARABEL")
            status = problem.status
        except cp.error.SolverError:
            status = None
        if status not in acceptable:
            try:
                problem.solve(solver="SCS", eps=1e-9, max_iters=200_000)
            except cp.error.SolverError as exc:
                raise SolverConvergenceError(f"semidefinite feasibility solve failed: {exc}") from exc
    if problem.value is None or problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise SolverConvergenceError(
            f"semidefinite feasibility solve ended with status {problem.status}"
        )
    return float(problem.value)


def degradation_radius(
    rho: BipartiteState,
    tau: BipartiteState,
    tol: float = 1e-7,
    eta_tol: float = 1e-6,
) -> DegradationResult:
    """Largest eta such that rho_eta is a local degradation of tau on Alice.

    rho_eta = eta rho + (1-eta) (1/d_A) x rho_B.  Feasibility of a CPTP
    channel E with (E x I)[tau] = rho_eta is decided by minimizing the
    Frobenius residual over Choi matrices; eta is bisected to ``eta_tol``
    outside the solve, which is valid because the feasible set in eta is an
    interval starting at 0 (the fully depolarizing channel).

    When tau is unsteerable for a measurement class, the returned value is a
    certified lower bound on the critical radius of rho for that class; with
    the roles informed (rho of known radius), a value exceeding that radius
    certifies steerability of tau.
    """
    if (rho.dimA, rho.dimB) != (tau.dimA, tau.dimB):
        raise ValueError("rho and tau must share their local dimensions")
    _check_maximally_mixed_marginal(rho, "rho")
    _check_maximally_mixed_marginal(tau, "tau")

    problem, choi_var, eta_param = _degradation_program(rho, tau)

    witness_mat = None
    solves = 0

    def feasible(eta: float) -> bool:
        nonlocal witness_mat, solves
        eta_param.value = eta
        residual = _solve_feasibility(problem)
        solves += 1
        if residual <= tol:
            witness_mat = np.array(choi_var.value)
            return True
        return False

    if feasible(1.0):
        lo = 1.0
    else:
        lo, hi = 0.0, 1.0
        while hi - lo > eta_tol:
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        if witness_mat is None:
            feasible(lo)

    witness = None
    residual = math.inf
    if witness_mat is not None:
        projected = _project_to_cptp(witness_mat, rho.dimA, rho.dimA)
        witness = ChannelChoi(dim_in=rho.dimA, dim_out=rho.dimA, matrix=projected)
        eta_param.value = lo
        mapped = apply_channel_to_alice(witness, tau)
        noise = np.kron(np.eye(rho.dimA) / rho.dimA, marginal_b(rho))
        target = lo * rho.entries + (1 - lo) * noise
        residual = float(np.abs(np.linalg.eigvalsh(mapped - target)).sum())
    return DegradationResult(value=lo, witness=witness, witness_residual=residual, solves=solves)


def twirling_fidelities(rho: BipartiteState) -> TwirlingFidelities:
    """Overlaps F_S = Tr(S rho) and F_W = Tr(F rho).

    Both are preserved when rho is averaged over local unitaries of the form
    U x U* (F_S) or U x U (F_W), which project onto the isotropic and Werner
    families respectively.
    """
    if rho.dimA != rho.dimB:
        raise ValueError("twirling fidelities require equal local dimensions")
    d = rho.dimA
    f_s = float((max_entangled_projector(d).entries @ rho.entries).trace().real)
    f_w = float((swap_operator(d).entries @ rho.entries).trace().real)
    return TwirlingFidelities(f_s=f_s, f_w=f_w)


def steerability_upper_bound(
    rho: BipartiteState,
    r2_werner: float,
    r2_isotropic: float,
    iso_denominator_printed: bool = False,
) -> float:
    """Twirling upper bound on the critical radius of rho.

    Averaging rho over local unitaries U x U (resp. U x U*) lands on the
    Werner (resp. isotropic) family member whose mixing parameter is fixed
    by the preserved fidelity, eta_W = (1 - d F_W)/(d + 1) and
    eta_S = (d^2 F_S - 1)/(d^2 - 1), and the critical radius cannot
    decrease along the way.  The bound is therefore

        min{ (d+1) r2_werner / (1 - d F_W),
             (d^2-1) r2_isotropic / (d^2 F_S - 1) },

    skipping any branch with a non-positive denominator (the twirl lands on
    the anticorrelated side of the noise point, so no bound follows);
    returns +inf if both branches are vacuous.  A value below 1 certifies
    steerability for the measurement class of the supplied family radii.
    It is tight on both families themselves.

    ``iso_denominator_printed`` switches the isotropic denominator to
    d^2 - F_S - 1.  That variant circulates in print but is not implied by
    the twirling argument and is already falsified on the Werner anchor,
    where it would cap the radius at r2_isotropic; it is kept only for
    comparison.
    """
    if rho.dimA != rho.dimB:
        raise ValueError("the twirling bound requires equal local dimensions")
    d = rho.dimA
    fids = twirling_fidelities(rho)
    branches = []
    den_w = 1.0 - d * fids.f_w
    if den_w > 0.0:
        branches.append((d + 1) * r2_werner / den_w)
    den_s = d * d - fids.f_s - 1.0 if iso_denominator_printed else d * d * fids.f_s - 1.0
    if den_s > 0.0:
        branches.append((d * d - 1) * r2_isotropic / den_s)
    return min(branches) if branches else math.inf
