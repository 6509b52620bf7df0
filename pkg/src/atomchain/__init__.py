"""Collective spectra of a 1D atomic array in a spatially modulated magnetic field.

The package builds the non-Hermitian effective Hamiltonian of a chain of
V-type atoms (one ``sigma+`` and one ``sigma-`` transition per atom), solves
finite open chains and magnetic-supercell Bloch problems, and classifies
super- and subradiant boundary states.  Lengths are in units of the resonant
wavelength, rates and detunings in units of the single-atom decay rate.
"""
from .analysis import (
    EXPECTED_BOUNDARY_LABELS,
    Branch,
    BranchError,
    IntensityProfile,
    ModeLabel,
    Polarization,
    Radiance,
    Side,
    Thresholds,
    branch_slope,
    classify_mode,
    decay_range_along_branch,
    intensity_profile,
    label_sweep,
    track_branches,
)
from .core import (
    ChainConfig,
    CollectiveMode,
    ComplexEigenvalue,
    ConfigError,
    format_config,
    load_config,
    parse_config,
    reduce_phase,
)
from .eigen import EigenError, EigenResult, eigendecompose, eigenvalues, verify_residuals
from .greens import (
    BlochCoupling,
    LightLineSingular,
    Method,
    PairCoupling,
    bloch_sum,
    pair_coupling,
    residue_class_sum,
)
from .hamiltonian import (
    BlochHamiltonian,
    FiniteHamiltonian,
    build_bloch,
    build_finite,
    decay_matrix,
    farey_sequence,
    polarization_swap,
    rational_flux,
    zeeman_profile,
)
from .spectra import (
    GapSet,
    Origin,
    SpectrumSet,
    SweepError,
    SweepKind,
    bloch_spectrum,
    butterfly_sweep,
    detect_gaps,
    open_chain_sweep,
)

__version__ = "0.1.0"
