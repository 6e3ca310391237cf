"""Steering ellipsoids, maximal distinguishability and quantum discord for two qubits."""

from .correlations import (CorrelationReport, conditional_entropy,
                           correlation_report, discord, is_zero_discord,
                           mutual_information, q_star, two_param_discord_closed_form,
                           two_param_q, two_param_state)
from .errors import (DegenerateOutcome, ExhaustedRejection, Indeterminate,
                     InvalidState, NonPhysical, NotCanonical, OptimizationFailure,
                     OutOfDomain, PureBobMarginal, SingularFilter, SteeringError)
from .sampling import Category, SamplerConfig, sample_category, sample_generic
from .state import (BlochState, SingleQubitState, from_density_matrix,
                    load_state, partial_trace, to_canonical, to_density_matrix,
                    von_neumann_entropy)
from .steering import (Branch, MeasurementDirection, OptimizationResult,
                       SteeredPair, canonical_ellipsoid, d_squared, max_distance,
                       stationary_residual, steer)

__version__ = "0.1.0"
