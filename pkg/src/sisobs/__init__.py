"""Set-valued simultaneous input and state observers for bounded-error
discrete-time nonlinear systems.

The package designs fixed-order observers that output hyperball estimates
(center plus 2-norm radius) for both the state and a completely unknown
input, with gains obtained from semidefinite programs and radii from
closed-form recursions.  See the README for the pipeline overview.
"""

from .errors import (AbstractionFailureError, CertifiedImpossibleError,
                     DesignImpossibleError, InputRadiusUnavailableError,
                     ModelInvalidError, NumericFailureError, SisobsError,
                     SynthesisInfeasibleError)
from .sysmodel import (FunctionClassSpec, NonlinearSystem, lipschitz_from_lpv,
                       lipschitz_from_qcstar, lump_unknown_inputs,
                       qc_from_lipschitz, qc_holds_on_samples, qc_rescale,
                       qcstar_from_bounded_decomposition, qcstar_from_qc)
from .transform import (TransformedSystem, decompose_feedthrough,
                        invariant_zeros, lpv_strong_detectability_necessary,
                        rank_condition, strong_detectability, transform_system)
from .abstraction import (AffineAbstraction, IntervalBox, abstract_on_box,
                          midline_observation)
from .synthesis import (FixedGains, ProbeResult, SynthesisResult,
                        class_multiplier_blocks, fixed_gains, hinf_design,
                        hinf_design_convergent, instability_probe, lti_design,
                        stability_feasibility, stability_search)
from .bounds import (RadiiParams, class_radii_params, geometric_sum,
                     lpv_convergence_check, radii_sequences, steady_state,
                     theta1_of)
from .observer import (BallEstimate, ObserverDesign, ObserverState,
                       design_observer, error_dynamics_matrices, initialize,
                       step)
from .harness import (BatchSummary, Scenario, Trace, builtin_system, export,
                      load_scenario, run_batch, sample_bounded_noise, simulate)

__version__ = "0.1.0"
