"""Quantum steering critical radii and local hidden state models.

Library layout:
    qops      states, measurements, partial traces, Haar sampling
    capacity  Beta moment-body cross-sections of the Haar-ensemble capacity
    radii     critical radii of the Werner and isotropic families
    lhs       response model for POVMs on Werner states
    criteria  channel-degradation and twirling criteria for general states
    cli       command-line front end (also ``python -m qsteer``)
"""

from .capacity import (
    MomentBody,
    PlanePoint,
    contains,
    reg_inc_beta,
    threshold_point_lower,
    threshold_point_upper,
    v_range,
)
from .criteria import (
    ChannelChoi,
    DegradationResult,
    TwirlingFidelities,
    apply_channel_to_alice,
    degradation_radius,
    identity_choi,
    normalize_bob_marginal,
    steerability_upper_bound,
    twirling_fidelities,
)
from .errors import SolverConvergenceError
from .lhs import (
    AssemblageEstimate,
    MonteCarlo,
    Quadrature,
    ResponseModel,
    assemblage_deviation_sigmas,
    povm_lower_bound_werner,
    realized_eta,
    realized_eta_value,
    reconstruct_assemblage,
    response,
    response_from_overlaps,
)
from .qops import (
    DEFAULT_TOLERANCES,
    BipartiteState,
    DensityMatrix,
    HermitianOperator,
    Povm,
    Projection,
    Tolerances,
    WeightedProjection,
    canonical_povm,
    conditional_state,
    haar_state_sample,
    haar_state_samples,
    haar_unitary_sample,
    isotropic_state,
    marginal_a,
    marginal_b,
    max_entangled_projector,
    swap_operator,
    werner_state,
)
from .radii import (
    CriticalRadiusResult,
    FamilyKind,
    HierarchyReport,
    RankScanRow,
    ReferenceThresholds,
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

__version__ = "0.1.0"
