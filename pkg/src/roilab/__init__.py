"""Sequential qubit measurement toolkit.

Simulates two-step measurement protocols on polarization qubits: noisy-Z
instruments with the minimally disturbing state update, sequential joint
observables and their margins, joint-measurability feasibility, worst-case
Wasserstein-2 uncertainty sums, hidden-variable-level retrieval criteria,
and a stage-by-stage interferometer model, with shipped reference
experimental tables for comparison.
"""

from . import errors
from .hv import (
    HvModel,
    SequentialStats,
    check_nsit,
    check_roi,
    classical_to_quantum,
    quantum_to_classical,
    sequential_stats,
)
from .jointmeas import HAVE_KERNEL, JmReport, jm_feasible
from .linalg import HermEig, born_prob, herm_eig, psd_sqrt, schur
from .measurements import (
    BinaryPovm,
    Instrument,
    JointPovm,
    apply_instrument,
    heisenberg,
    joint_for_gamma,
    lueders_instrument,
    margins,
    noisy_x,
    noisy_z,
    sequential_joint,
    total_channel,
    trivial_instrument,
)
from .pipeline import (
    PipelineTrace,
    mixed_noisy_x_prob,
    pipeline_vs_lueders,
    propagate,
    tomography_prob,
)
from .uncertainty import (
    BinaryDist,
    UncertaintyReport,
    blw_sum_scan,
    corr_bound,
    correlation,
    uncertainty_sum,
    variance,
    w2_sq,
    worst_case_delta_sq,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "HvModel",
    "SequentialStats",
    "check_nsit",
    "check_roi",
    "classical_to_quantum",
    "quantum_to_classical",
    "sequential_stats",
    "HAVE_KERNEL",
    "JmReport",
    "jm_feasible",
    "HermEig",
    "born_prob",
    "herm_eig",
    "psd_sqrt",
    "schur",
    "BinaryPovm",
    "Instrument",
    "JointPovm",
    "apply_instrument",
    "heisenberg",
    "joint_for_gamma",
    "lueders_instrument",
    "margins",
    "noisy_x",
    "noisy_z",
    "sequential_joint",
    "total_channel",
    "trivial_instrument",
    "PipelineTrace",
    "mixed_noisy_x_prob",
    "pipeline_vs_lueders",
    "propagate",
    "tomography_prob",
    "BinaryDist",
    "UncertaintyReport",
    "blw_sum_scan",
    "corr_bound",
    "correlation",
    "uncertainty_sum",
    "variance",
    "w2_sq",
    "worst_case_delta_sq",
    "__version__",
]
