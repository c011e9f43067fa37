"""Two-dimensional cross-sections of the Haar-ensemble capacity.

The capacity of the uniform (Haar) ensemble on pure states of C^d is the
convex set of operators ``K = integral g(l) |l><l| dHaar(l)`` with response
functions ``0 <= g <= 1``.  Its cross-section with the plane spanned by a
rank-r projection P and the identity reduces to a classical two-moment
problem: writing ``t = <l|P|l>``, which is Beta(r, d-r)-distributed under
the Haar measure, a plane member ``u P + v (1 - P)`` corresponds to

    u = E[g t] / r,        v = (E[g] - E[g t]) / (d - r),

over measurable responses ``0 <= g(t) <= 1``.  By threshold extremality
(Neyman-Pearson), the boundary is traced by indicator responses
``g = 1{t <= c}`` (upper branch in v) and ``g = 1{t >= c}`` (lower branch),
so the whole geometry is expressed through the regularized incomplete beta
function, which this module implements from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MomentBody",
    "PlanePoint",
    "reg_inc_beta",
    "threshold_point_lower",
    "threshold_point_upper",
    "v_range",
    "contains",
]

_CF_MAXITER = 500
_CF_EPS = 3e-16
_ROOT_MAXITER = 200
_ROOT_TOL = 1e-12
_MEMBERSHIP_EPS = 1e-11

# Stirling-series tail of lgamma, good to <1e-16 for z >= 50.
_LARGE_AB = 50.0


def _stirling_tail(z):
    zi2 = 1.0 / (z * z)
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - zi2 / 1680.0) * zi2) * zi2) / z


def _lgamma_shift(s: float, z: float) -> float:
    # lgamma(z + s) - lgamma(z) in a cancellation-free form; needs z >= 50.
    return (
        (z - 0.5) * math.log1p(s / z)
        + s * math.log(z + s)
        - s
        + _stirling_tail(z + s)
        - _stirling_tail(z)
    )


def _log_front_scalar(x: float, a: float, b: float) -> float:
    # log of x^a (1-x)^b / B(a,b).  Large gamma arguments make the naive
    # lgamma differences cancel catastrophically, so the large regimes group
    # the cancellation inside well-conditioned log arguments.
    if min(a, b) >= _LARGE_AB:
        x0 = a / (a + b)
        return (
            a * math.log(x / x0)
            + b * math.log((1.0 - x) / (1.0 - x0))
            + 0.5 * math.log(a * b / ((a + b) * 2.0 * math.pi))
            + _stirling_tail(a + b)
            - _stirling_tail(a)
            - _stirling_tail(b)
        )
    shared = a * math.log(x) + b * math.log1p(-x)
    if b >= _LARGE_AB:
        return shared - math.lgamma(a) + _lgamma_shift(a, b)
    if a >= _LARGE_AB:
        return shared - math.lgamma(b) + _lgamma_shift(b, a)
    return shared + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)


def _betacf_scalar(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta integral, evaluated with the
    # modified Lentz scheme.  Caller guarantees x < (a+1)/(a+b+2).
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2.0 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise RuntimeError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def _reg_inc_beta_scalar(x: float, a: float, b: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(_log_front_scalar(x, a, b)) * _betacf_scalar(a, b, x) / a
    return 1.0 - math.exp(_log_front_scalar(1.0 - x, b, a)) * _betacf_scalar(b, a, 1.0 - x) / b


def _lgamma_shift_array(s, z):
    safe_z = np.maximum(z, _LARGE_AB)  # only read where z >= _LARGE_AB
    return (
        (safe_z - 0.5) * np.log1p(s / safe_z)
        + s * np.log(safe_z + s)
        - s
        + _stirling_tail(safe_z + s)
        - _stirling_tail(safe_z)
    )


def _log_front_array(x, a, b):
    from scipy.special import gammaln

    with np.errstate(divide="ignore", invalid="ignore"):
        x0 = a / (a + b)
        both_large = (
            a * np.log(x / x0)
            + b * np.log((1.0 - x) / (1.0 - x0))
            + 0.5 * np.log(a * b / ((a + b) * 2.0 * np.pi))
            + _stirling_tail(a + b)
            - _stirling_tail(a)
            - _stirling_tail(b)
        )
        shared = a * np.log(x) + b * np.log1p(-x)
        b_large = shared - gammaln(a) + _lgamma_shift_array(a, b)
        a_large = shared - gammaln(b) + _lgamma_shift_array(b, a)
        plain = shared + gammaln(a + b) - gammaln(a) - gammaln(b)
    out = np.where(
        np.minimum(a, b) >= _LARGE_AB,
        both_large,
        np.where(b >= _LARGE_AB, b_large, np.where(a >= _LARGE_AB, a_large, plain)),
    )
    return out


def _reg_inc_beta_array(x, a, b):
    x, a, b = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    )
    direct = x < (a + 1.0) / (a + b + 2.0)
    xx = np.where(direct, x, 1.0 - x)
    aa = np.where(direct, a, b)
    bb = np.where(direct, b, a)
    # Boundary entries get a harmless interior placeholder; their results
    # are forced to 0/1 at the end.
    interior = (x > 0.0) & (x < 1.0)
    xx = np.where(interior, xx, 0.5)

    front = np.exp(_log_front_array(xx, aa, bb))

    tiny = 1e-300
    qab, qap, qam = aa + bb, aa + 1.0, aa - 1.0
    c = np.ones_like(xx)
    d = 1.0 - qab * xx / qap
    np.copyto(d, tiny, where=np.abs(d) < tiny)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(xx.shape, dtype=bool)
    converged = False
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2.0 * m
        num = m * (bb - m) * xx / ((qam + m2) * (aa + m2))
        d = 1.0 + num * d
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = 1.0 + num / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        h *= d * c
        num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2))
        d = 1.0 + num * d
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = 1.0 + num / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = d * c
        h *= delta
        done |= np.abs(delta - 1.0) < _CF_EPS
        if m % 8 == 0 and done.all():
            converged = True
            break
    if not converged and not done.all():
        raise RuntimeError("incomplete beta continued fraction did not converge on array input")

    res = front * h / aa
    res = np.where(direct, res, 1.0 - res)
    res = np.where(x <= 0.0, 0.0, res)
    res = np.where(x >= 1.0, 1.0, res)
    return res


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    Continued-fraction evaluation with the symmetry split at
    ``x = (a+1)/(a+b+2)``; absolute error stays below 1e-12 across the
    parameter range exercised here (integer a, b up to ~1e3 at any x, and
    a <= 3 with b up to ~1e5), degrading to a few 1e-12 only when both
    parameters approach 1e5.  Accepts scalars or broadcastable arrays.
    """
    if np.isscalar(x) and np.isscalar(a) and np.isscalar(b):
        x, a, b = float(x), float(a), float(b)
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"x must lie in [0, 1], got {x}")
        if a <= 0.0 or b <= 0.0:
            raise ValueError(f"a and b must be positive, got a={a}, b={b}")
        return _reg_inc_beta_scalar(x, a, b)
    xa = np.asarray(x, dtype=float)
    aa = np.asarray(a, dtype=float)
    ba = np.asarray(b, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise ValueError("x must lie in [0, 1]")
    if np.any(aa <= 0.0) or np.any(ba <= 0.0):
        raise ValueError("a and b must be positive")
    return _reg_inc_beta_array(xa, aa, ba)


def _betainc_root_scalar(a: float, b: float, target: float) -> float:
    # Smallest x with I_x(a, b) = target, by bracketing bisection.
    if target <= 0.0:
        return 0.0
    if target >= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(_ROOT_MAXITER):
        mid = 0.5 * (lo + hi)
        if _reg_inc_beta_scalar(mid, a, b) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < _ROOT_TOL:
            break
    else:
        raise RuntimeError(f"bisection for I_x({a},{b}) = {target} hit the iteration cap")
    return 0.5 * (lo + hi)


def _betainc_root_array(a, b, target):
    a, b, target = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(target, dtype=float)
    )
    lo = np.zeros(a.shape)
    hi = np.ones(a.shape)
    for _ in range(_ROOT_MAXITER):
        mid = 0.5 * (lo + hi)
        below = _reg_inc_beta_array(mid, a, b) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if (hi - lo).max() < _ROOT_TOL:
            break
    x = 0.5 * (lo + hi)
    x = np.where(target <= 0.0, 0.0, x)
    x = np.where(target >= 1.0, 1.0, x)
    return x


@dataclass(frozen=True)
class MomentBody:
    """Capacity cross-section through a rank-r projection in dimension d.

    The scalar overlap t = <l|P|l> of a Haar state with a rank-r projection
    follows Beta(r, d-r); the body is the set of reachable first-moment
    pairs (u, v) defined in the module docstring.
    """

    d: int
    r: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if not 1 <= self.r <= self.d - 1:
            raise ValueError(f"rank must lie in [1, {self.d - 1}], got {self.r}")


@dataclass(frozen=True)
class PlanePoint:
    """Eigenvalue coordinates (u on the P block, v on the 1-P block)."""

    u: float
    v: float


def _lower_uv(d: int, r: int, c: float) -> tuple[float, float]:
    # g = 1{t <= c}:  E[g t] = (r/d) I_c(r+1, d-r),  E[g] = I_c(r, d-r).
    u = _reg_inc_beta_scalar(c, r + 1.0, d - r) / d
    v = (_reg_inc_beta_scalar(c, float(r), d - r) - r * u) / (d - r)
    return u, v


def _upper_uv(d: int, r: int, c: float) -> tuple[float, float]:
    # g = 1{t >= c}: complement moments of the lower family.
    u = (1.0 - _reg_inc_beta_scalar(c, r + 1.0, d - r)) / d
    v = ((1.0 - _reg_inc_beta_scalar(c, float(r), d - r)) - r * u) / (d - r)
    return u, v


def threshold_point_lower(body: MomentBody, c: float) -> PlanePoint:
    """Boundary point of the response family g = 1{t <= c}.

    As c sweeps [0, 1] this family traces the upper boundary v_max(u): among
    responses with a fixed first moment E[g t] it maximizes the total mass
    E[g], hence v.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"cutoff must lie in [0, 1], got {c}")
    u, v = _lower_uv(body.d, body.r, float(c))
    return PlanePoint(u, v)


def threshold_point_upper(body: MomentBody, c: float) -> PlanePoint:
    """Boundary point of the response family g = 1{t >= c}.

    Traces the lower boundary v_min(u), i.e. the family maximizing u - v.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"cutoff must lie in [0, 1], got {c}")
    u, v = _upper_uv(body.d, body.r, float(c))
    return PlanePoint(u, v)


def v_range(body: MomentBody, u: float) -> tuple[float, float]:
    """Extremal v coordinates of body members with P-block eigenvalue u.

    Both extremes come from threshold responses whose cutoff is found by
    monotone bisection on the first-moment condition
    ``I_c(r+1, d-r) = d u`` (lower family) and its complement.
    """
    d, r = body.d, body.r
    if not 0.0 <= u <= 1.0 / d + 1e-15:
        raise ValueError(f"u must lie in [0, 1/d] = [0, {1.0 / d}], got {u}")
    du = min(1.0, d * u)
    c_max = _betainc_root_scalar(r + 1.0, float(d - r), du)
    v_max = (_reg_inc_beta_scalar(c_max, float(r), float(d - r)) - r * u) / (d - r)
    c_min = _betainc_root_scalar(r + 1.0, float(d - r), 1.0 - du)
    v_min = ((1.0 - _reg_inc_beta_scalar(c_min, float(r), float(d - r))) - r * u) / (d - r)
    return v_min, v_max


def contains(body: MomentBody, p: PlanePoint, eps: float = _MEMBERSHIP_EPS) -> bool:
    """Membership oracle for the capacity cross-section.

    True iff 0 <= u <= 1/d and v_min(u) - eps <= v <= v_max(u) + eps.
    """
    if not 0.0 <= p.u <= 1.0 / body.d:
        return False
    v_min, v_max = v_range(body, p.u)
    return v_min - eps <= p.v <= v_max + eps
