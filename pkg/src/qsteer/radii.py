"""Steering critical radii for the Werner and isotropic families.

For a dichotomic measurement whose smaller effect is a rank-r projection,
the conditional state of either family lives in the plane spanned by the
projection and the identity, so steerability at mixing parameter eta
reduces to membership of a single plane point in the capacity
cross-section.  The per-rank critical radius is the largest eta whose
point is still inside; the dichotomic radius minimizes over
r = 1 .. floor(d/2) (complement duality makes larger ranks redundant).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .capacity import (
    MomentBody,
    PlanePoint,
    _betainc_root_array,
    _reg_inc_beta_array,
    contains,
)
from .errors import SolverConvergenceError
from .lhs import povm_lower_bound_werner

__all__ = [
    "FamilyKind",
    "StateFamily",
    "CriticalRadiusResult",
    "ReferenceThresholds",
    "HierarchyReport",
    "SolverConvergenceError",
    "conditional_plane_point",
    "critical_radius_rank",
    "critical_radius_dichotomic",
    "closed_form_r2",
    "reference_thresholds",
    "hierarchy_check",
    "rank_radius_profile",
    "RankScanRow",
    "rank_minimality_scan",
]

_ETA_TOL = 1e-10
_MAX_BISECT = 200


class FamilyKind(enum.Enum):
    WERNER = "werner"
    ISOTROPIC = "isotropic"


@dataclass(frozen=True)
class StateFamily:
    """One-parameter noisy family (Werner or isotropic) at dimension d."""

    kind: FamilyKind
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")


@dataclass(frozen=True)
class CriticalRadiusResult:
    """Rank-minimized dichotomic radius with per-rank solver diagnostics."""

    value: float
    achieving_rank: int
    per_rank: tuple[tuple[int, float], ...]
    solver_iterations: int
    residual: float


@dataclass(frozen=True)
class ReferenceThresholds:
    """Known separability and projective-measurement thresholds."""

    separability: float
    projective: float


def _max_rank(d: int) -> int:
    return d // 2


def conditional_plane_point(family: StateFamily, r: int, eta: float) -> PlanePoint:
    """Eigenvalue coordinates of Bob's conditional state for a rank-r effect.

    Werner:     u = eta (r-1)/(d(d-1)) + (1-eta) r/d^2,
                v = eta r/(d(d-1)) + (1-eta) r/d^2.
    Isotropic:  u = eta/d + (1-eta) r/d^2,   v = (1-eta) r/d^2.
    """
    d = family.d
    if not 1 <= r <= _max_rank(d):
        raise ValueError(f"rank must lie in [1, {_max_rank(d)}], got {r}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {eta}")
    noise = r / d**2
    if family.kind is FamilyKind.WERNER:
        u = eta * (r - 1) / (d * (d - 1)) + (1.0 - eta) * noise
        v = eta * r / (d * (d - 1)) + (1.0 - eta) * noise
    else:
        u = eta / d + (1.0 - eta) * noise
        v = (1.0 - eta) * noise
    return PlanePoint(u, v)


def _complement_point(d: int, p: PlanePoint) -> PlanePoint:
    return PlanePoint(1.0 / d - p.u, 1.0 / d - p.v)


def _solve_radius_rank(family: StateFamily, r: int) -> tuple[float, int, float]:
    body = MomentBody(family.d, r)
    if contains(body, conditional_plane_point(family, r, 1.0)):
        return 1.0, 0, 0.0
    lo, hi = 0.0, 1.0
    iterations = 0
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        iterations += 1
        if contains(body, conditional_plane_point(family, r, mid)):
            lo = mid
        else:
            hi = mid
        if hi - lo <= _ETA_TOL:
            break
    else:
        raise SolverConvergenceError(
            f"radius bisection for {family.kind.value} d={family.d} r={r} hit the iteration cap"
        )
    # The complement effect's conditional point must be inside as well; this
    # follows from the body's symmetry under g -> 1-g, so assert, don't solve.
    inside = conditional_plane_point(family, r, lo)
    assert contains(body, _complement_point(family.d, inside))
    return lo, iterations, hi - lo


def critical_radius_rank(family: StateFamily, r: int) -> float:
    """Largest eta whose rank-r conditional point stays inside the capacity.

    Bisection on eta to 1e-10, with the cross-section membership oracle as
    the feasibility test.
    """
    value, _, _ = _solve_radius_rank(family, r)
    return value


def critical_radius_dichotomic(family: StateFamily) -> CriticalRadiusResult:
    """Dichotomic critical radius: minimize the per-rank radius over r."""
    per_rank = []
    iterations = 0
    residual = 0.0
    for r in range(1, _max_rank(family.d) + 1):
        value, its, res = _solve_radius_rank(family, r)
        per_rank.append((r, value))
        iterations += its
        residual = max(residual, res)
    best = min(per_rank, key=lambda item: item[1])
    return CriticalRadiusResult(
        value=best[1],
        achieving_rank=best[0],
        per_rank=tuple(per_rank),
        solver_iterations=iterations,
        residual=residual,
    )


def closed_form_r2(family: StateFamily) -> float:
    """Closed-form dichotomic radius of the family.

    Werner:    (d-1)^2 [1 - (1 - 1/d)^(1/(d-1))]
    Isotropic: 1 - d^(-1/(d-1))
    Evaluated through expm1/log1p to avoid cancellation at large d.
    """
    d = family.d
    if family.kind is FamilyKind.WERNER:
        return (d - 1) ** 2 * -math.expm1(math.log1p(-1.0 / d) / (d - 1))
    return -math.expm1(-math.log(d) / (d - 1))


def reference_thresholds(family: StateFamily) -> ReferenceThresholds:
    """Separability limit and projective-measurement radius of the family."""
    d = family.d
    if family.kind is FamilyKind.WERNER:
        projective = 1.0 - 1.0 / d
    else:
        harmonic = math.fsum(1.0 / k for k in range(1, d + 1))
        projective = (harmonic - 1.0) / (d - 1)
    return ReferenceThresholds(separability=1.0 / (d + 1), projective=projective)


@dataclass(frozen=True)
class HierarchyReport:
    """Ordering of the radii thresholds for one family and dimension."""

    family: StateFamily
    r2: float
    projective: float
    separability: float
    povm_lower_bound: float | None
    comparisons: tuple[tuple[str, float, float, bool], ...]
    satisfied: bool
    note: str


def hierarchy_check(family: StateFamily) -> HierarchyReport:
    """Check the measurement-class ordering of the thresholds.

    Dichotomic >= projective always; for Werner states the POVM model's
    lower bound must in turn not exceed the projective radius.
    """
    r2 = closed_form_r2(family)
    refs = reference_thresholds(family)
    comparisons = [("r2 >= projective", r2, refs.projective, r2 >= refs.projective - 1e-12)]
    povm_lb = None
    if family.kind is FamilyKind.WERNER:
        povm_lb = povm_lower_bound_werner(family.d)
        comparisons.append(
            ("povm_lower_bound <= projective", povm_lb, refs.projective, povm_lb <= refs.projective + 1e-12)
        )
    if family.d == 2:
        note = "two-qubit collapse: the dichotomic and projective radii coincide"
    elif family.d == 3 and r2 > refs.projective:
        note = (
            "projective measurements on d=3 have three outcomes, so the "
            "three-outcome radius is at most the projective one; the strict "
            "gap therefore proves that some three-outcome measurement steers "
            "where no dichotomic measurement can"
        )
    else:
        note = (
            "d-outcome measurements include the projective ones, so the "
            "d-outcome radius is bounded by the projective radius"
        )
    return HierarchyReport(
        family=family,
        r2=r2,
        projective=refs.projective,
        separability=refs.separability,
        povm_lower_bound=povm_lb,
        comparisons=tuple(comparisons),
        satisfied=all(ok for *_, ok in comparisons),
        note=note,
    )


def _crossing_eta(kind: FamilyKind, d: np.ndarray, r: np.ndarray) -> np.ndarray:
    # At the boundary crossing, trace consistency pins the threshold cutoff
    # through I_c(r, d-r) = r/d (Werner, upper boundary binds) or
    # I_c(r, d-r) = (d-r)/d (isotropic, lower boundary binds); eta then
    # follows from the remaining moment coordinate.  Equivalent to the
    # bisection-membership route, but one root-find per (d, r) pair and
    # fully vectorized.
    d = np.asarray(d, dtype=float)
    r = np.asarray(r, dtype=float)
    b = d - r
    if kind is FamilyKind.WERNER:
        c = _betainc_root_array(r, b, r / d)
        i_next = _reg_inc_beta_array(c, r + 1.0, b)
        eta = d * (d - 1.0) / b * (r / d - i_next)
    else:
        c = _betainc_root_array(r, b, b / d)
        i_next = _reg_inc_beta_array(c, r + 1.0, b)
        eta = d / b * (b / d - i_next)
    return np.minimum(eta, 1.0)


def rank_radius_profile(family: StateFamily) -> np.ndarray:
    """Per-rank radii for r = 1 .. floor(d/2), solved in one vectorized pass."""
    ranks = np.arange(1, _max_rank(family.d) + 1)
    return _crossing_eta(family.kind, np.full(ranks.shape, family.d), ranks)


@dataclass(frozen=True)
class RankScanRow:
    d: int
    per_rank: tuple[float, ...]
    achieving_rank: int
    value: float


def rank_minimality_scan(kind: FamilyKind, d_max: int, d_min: int = 2) -> list[RankScanRow]:
    """Per-rank radii and the minimizing rank for every d in [d_min, d_max].

    All (d, r) pairs are solved in a single flattened vectorized pass, which
    keeps scans up to d ~ 1e3 in the seconds range.
    """
    if d_min < 2 or d_max < d_min:
        raise ValueError(f"need 2 <= d_min <= d_max, got [{d_min}, {d_max}]")
    dims = np.concatenate([np.full(_max_rank(d), d) for d in range(d_min, d_max + 1)])
    ranks = np.concatenate([np.arange(1, _max_rank(d) + 1) for d in range(d_min, d_max + 1)])
    values = _crossing_eta(kind, dims, ranks)
    rows = []
    offset = 0
    for d in range(d_min, d_max + 1):
        n = _max_rank(d)
        per_rank = values[offset : offset + n]
        offset += n
        k = int(np.argmin(per_rank))
        rows.append(
            RankScanRow(
                d=d,
                per_rank=tuple(float(x) for x in per_rank),
                achieving_rank=k + 1,
                value=float(per_rank[k]),
            )
        )
    return rows
