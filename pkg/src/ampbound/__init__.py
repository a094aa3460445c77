"""Entropy, heat and particle-flow bounds for parametric amplification.

A two-oscillator "system plus thermal environment" pair driven by a
pair-creating coupling, its closed-form thermodynamics, a truncated
Fock-space oracle that cross-validates every closed form, Bogoliubov
dynamics for arbitrary pump profiles, and per-mode scans for the field
generalization (scalar and two-polarization tensor modes).
"""

from .analytic import (
    BoundReport,
    Multiplicities,
    ThermalSpec,
    asymptotic_ratio,
    bound_ratio,
    delta_N,
    delta_Q,
    delta_S,
    entropy_gain,
    environment_pgf,
    environment_weights,
    joint_purity,
    nbar_from_thermal,
    ratio_from_occupation,
    ratio_from_temperature,
    system_weights,
)
from .dynamics import (
    BogoliubovPair,
    PumpProfile,
    SqueezeTriple,
    closed_form_qm,
    desitter_exact_pair,
    extract_squeeze,
    integrate_qm,
    integrate_uv,
)
from .field_modes import (
    ModeResult,
    ModeSpec,
    make_mode,
    mode_bound,
    spectrum,
    total_entropy,
)
from .fock_oracle import (
    DensityMatrix,
    TruncationSpec,
    choose_truncation,
    expectations,
    partial_trace,
    purity,
    verify_grid,
    verify_point,
    von_neumann_entropy,
)
from .su11 import (
    BCHFactors,
    SqueezeParams,
    TwoModeKet,
    bch_factors,
    build_joint_blocks,
    build_joint_density,
    evolve_basis_state,
)

__version__ = "0.1.0"
