"""weakres: weak-measurement simulation of Rabi and Ramsey resonances.

A small library plus CLI that treats quantum resonance as weak value
amplification: direct transition-probability scans, indirect von Neumann
pointer models, and the unified embedding that contains both.
"""

from . import direct, errors, linalg, pauli, probe, resonance, weakvalue
from .pauli import (
    ID2,
    MINUS,
    PLUS,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    HamiltonianPair,
    PauliDecomp,
    PiecewiseSchedule,
    decompose,
    evolve_piecewise,
    rabi_rotating_frame,
    ramsey_schedule,
    reconstruct,
    solve_sigma_a,
)
from .weakvalue import (
    SelectionPair,
    WeakValueReport,
    weak_value,
    weak_value_h,
    weak_value_LR,
    weak_value_log_derivative,
)
from .direct import (
    DirectConfig,
    TransitionResult,
    extract_complex_weak_value,
    extract_im_weak_value,
    predict_first_order,
    transition_exact,
)
from .probe import (
    CombinedState,
    MomentReport,
    ProbeModel,
    build_truncated_oscillator,
    build_two_path,
    evolve_and_postselect,
    extract_weak_value_from_shifts,
    moments,
    pointer_shift_measured,
    predict_shift_general,
    predict_shift_P,
    predict_shift_Q,
    unified_expectation,
)
from .resonance import (
    RabiParams,
    RamseyParams,
    ResonanceCurve,
    fwhm,
    rabi_indirect_shifts,
    rabi_prob_exact,
    rabi_prob_weak,
    ramsey_indirect_shifts,
    ramsey_prob_exact,
    ramsey_prob_weak,
    scan,
    sensitivity_compare,
)

__version__ = "0.1.0"
