"""Microscopic reversibility of coherent states coupled to a thermal bath.

Three independent routes to the same physics: closed-form Gaussian
expressions (gaussian_core, reversibility), a truncated Fock-space oracle
(fock_oracle), and a statistical measurement emulation
(heterodyne_experiment).  The cli module exposes all of them as commands.
"""

from .errors import (
    DegenerateData,
    DomainError,
    MicrorevError,
    NumericalUnderflow,
    TruncationTooSmall,
    ZeroBackwardProbability,
)
from .gaussian_core import (
    BathSpec,
    BeamSplitterSpec,
    ComplexAmplitude,
    DisplacedThermalState,
    TransitionQuery,
    backward_probability,
    forward_probability,
    interact,
    q_function,
)
from .reversibility import (
    RescaledPair,
    TransitionResult,
    beta_from_nth,
    classical_log_ratio,
    gibbs_rescale_final,
    gibbs_rescale_initial,
    gibbs_rescale_pair,
    heat,
    nth_from_beta,
    predicted_log_ratio,
    transition_result,
    upsilon_closed_form,
    upsilon_from_definition,
    upsilon_from_definition_coherent,
)

__version__ = "0.1.0"

__all__ = [
    "MicrorevError", "DomainError", "TruncationTooSmall",
    "ZeroBackwardProbability", "DegenerateData", "NumericalUnderflow",
    "ComplexAmplitude", "BathSpec", "BeamSplitterSpec",
    "DisplacedThermalState", "TransitionQuery",
    "interact", "q_function", "forward_probability", "backward_probability",
    "TransitionResult", "RescaledPair",
    "nth_from_beta", "beta_from_nth",
    "gibbs_rescale_initial", "gibbs_rescale_final", "gibbs_rescale_pair",
    "predicted_log_ratio", "heat", "classical_log_ratio",
    "upsilon_closed_form", "upsilon_from_definition",
    "upsilon_from_definition_coherent", "transition_result",
    "__version__",
]
