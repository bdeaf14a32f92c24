"""Pseudospectral simulation and resonance analysis of the damped, forced,
generalized KdV equation u_t + u_xxx + gamma*u + (g(u))_x = f on the torus.

Layers:

- ``spectral``: grids, mean-zero real spectral fields, dealiased products,
  Fourier multipliers, Sobolev norms, the damped Airy propagator.
- ``nonlinearity``: polynomial nonlinearities g and their exact evaluation.
- ``dynamics``: the integrating-factor RK4 evolution with simultaneous gauge
  phase integration, blow-up detection, and the linear steady state.
- ``gauge``: the translation gauge removing the rank-one resonant term, and
  the modified-equation residual check.
- ``resonance``: the dispersion function, interaction-case scans, the direct
  multilinear convolution oracle, resonant/nonresonant decompositions, the
  normal-form transform and its time-derivative identity.
- ``diagnostics``: conserved functionals, smoothing metrics, decay fits,
  absorbing-set detection, refinement studies.
- ``harness``/``cli``: JSON-configured reproducible runs with CSV/JSON output.
"""

from .spectral import (
    TWO_PI,
    Grid,
    PaddingError,
    SpectralField,
    airy_propagator,
    apply_multiplier,
    dealiased_product,
    good_fft_size,
    integral_of_power,
    mean_of_power,
    random_field,
    regrid,
    rough_field,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .nonlinearity import PolynomialNonlinearity
from .dynamics import (
    BlowUpError,
    Problem,
    SolverConfig,
    Trajectory,
    full_rhs,
    ifrk4_step,
    nonlinear_rhs,
    simulate,
    steady_state_linear,
)
from .gauge import (
    apply_gauge,
    exp_multiplier_identity_check,
    gauged_forcing,
    modified_pde_residual,
    theta_rate,
    ungauge_translate,
)
from .resonance import (
    DEFAULT_BUDGET,
    DEFAULT_CA,
    DEFAULT_LAMBDA,
    BudgetError,
    CaseLabel,
    CaseScan,
    SymbolSpec,
    TupleData,
    case_scan,
    classify_cases,
    convolve_many,
    convolve_n,
    decompose_hl_hh_re,
    decompose_r1_r2_nr,
    full_spec,
    h3_factorization_check,
    h_n,
    hl_operator,
    hl_slot1_spec,
    hl_sorted_spec,
    hh_sorted_spec,
    min_case_constant,
    nf_spec,
    nf_time_identity_residual,
    nonresonant_spec,
    re_sorted_spec,
    resonant_multiplicity_spec,
    resonant_spec,
    t_nf,
    v_from_definition,
)
from .diagnostics import (
    DecayFit,
    StudyRow,
    absorbing_entry,
    decay_fit,
    energy,
    mass,
    momentum,
    refinement_smoothing_study,
    rough_coefficients,
    smoothing_metric,
)
from .harness import (
    SCHEMA_VERSION,
    ConfigError,
    canonical_json,
    emit_json,
    format_float,
    run_id_for,
    splitmix64_stream,
)

__version__ = "0.1.0"
