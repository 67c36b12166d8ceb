"""Generalized cross sections for direct two-photon double ionization.

Two independent routes share one data model: a closed-form second-order
perturbative engine driven by tabulated one-photon cross sections, and
time propagation of a constrained block model Hamiltonian whose couplings
are inverted from the same tables. The routes cross-validate each other in
the weak-field, long-pulse limit.
"""

from .atoms import data_dir_from_env, load_atom, toy_atom
from .errors import (
    ConsistencyError,
    ConvergenceError,
    CoverageError,
    DomainError,
    InvalidArgumentError,
    InvalidModelError,
    NonperturbativeWarning,
    NsdiError,
    OrderingError,
    ParseError,
    StabilityError,
    TableError,
    WindowError,
)
from .perturbative import (
    ScanTable,
    SdcsCurve,
    dsigma_de,
    nonseq_window,
    nonseq_window_bounds,
    scan,
    sdcs,
    sdcs_kernel,
    total_xsec,
)
from .svg import PlotStyle, render_svg
from .tdse import (
    EnergyGrid,
    JointDistribution,
    ModelHamiltonian,
    PropagationResult,
    PulseSpec,
    StateVector,
    build_hamiltonian,
    default_grids,
    dipole_from_xsec,
    extract_joint,
    field_at,
    flux_squared_integral,
    propagate,
    tdse_sdcs,
)
from .units import (
    CONST,
    Constants,
    au_to_ev,
    au_to_mb,
    ev_to_au,
    gen_xsec_to_cm4s,
    mb_to_au,
    sdcs_au_to_cm4s_per_ev,
)
from .xsec import (
    AtomModel,
    CrossSectionCurve,
    constant_curve,
    hydrogenic_curve,
    hydrogenic_sigma,
    make_atom,
    parse_table,
    serialize_table,
    sigma_at,
)

__version__ = "0.1.0"
