"""Vacuum entanglement harvested by pairs of uniformly accelerated detectors.

Unruh-DeWitt detectors coupled to a massless scalar field in the Minkowski
vacuum. The package evaluates the cross term I_E for the standard
worldline configurations, the Planckian response rates, and the resulting
entanglement verdicts and measures, with brute-force oracles for checking.
"""

from .crossterm import (
    BoundedOnly,
    DeltaTerm,
    FiniteValue,
    InertialLimitParams,
    cross_term,
    cross_term_upper_bound,
    delta_coefficient,
    generalized_sigma,
    inertial_limit_cross_term,
    p_factor,
    residue_reduced_integrand,
)
from .entanglement import (
    DensityMatrixComponents,
    Verdict,
    assemble_density_matrix,
    concurrence_closed_form,
    concurrence_wootters,
    entanglement_of_formation,
    negativity_closed_form,
    negativity_from_partial_transpose,
    verdict,
    xi,
)
from .geometry import (
    SCENARIOS,
    AntiParallelLongitudinal,
    AntiParallelTransverse,
    BoostedPair,
    Detector,
    Oriented,
    ParallelDifferentAcceleration,
    ParallelLongitudinal,
    ParallelTransverse,
)
from .numerics import QuadratureConfig
from .oracle import OracleConfig, brute_force_cross_term, brute_force_response_rate
from .response import excitation_rate_per_proper_time, response_rate

__version__ = "0.1.0"
