"""Linear stability of a planar plasma-vacuum interface.

Compressible MHD on the plasma side, the full Maxwell system (displacement
current retained) on the vacuum side.  The package decides stability of a
planar equilibrium three ways: a sufficient condition from an energy
functional, a search for violently unstable normal modes, and parameter-plane
scans combining both.
"""

from .energy import (
    BoundaryResolution,
    EnergyForm,
    PCasePolynomial,
    StabilityResult,
    StabilityVerdict,
    assemble_energy_form,
    boundary_resolution,
    check_sufficient_stability,
    pcase_characteristic_poly,
    posdef_margins,
    static_threshold,
)
from .errors import (
    CollinearFields,
    ConsistencyViolation,
    DegenerateDenominator,
    EpsilonOutOfRange,
    ExpansionViolated,
    HyperbolicityViolated,
    InterfaceConstraintViolated,
    NotOrthogonalFields,
    UnsupportedCase,
    ValidationError,
)
from .matrices import (
    BoundaryMatrix,
    PlasmaMatrices,
    PlaneWave,
    SecondaryMatrices,
    VacuumMatrices,
    build_boundary_matrix,
    build_plasma_matrices,
    build_secondary_symmetrizer,
    build_vacuum_matrices,
    plane_wave_residual,
)
from .scan import (
    REGION_NAMES,
    RegionGrid,
    ScanSpec,
    export_grid,
    label_regions,
    parse_grid,
    scan_plane,
)
from .spectral import (
    DeterminantVariant,
    ModeProblem,
    ModeRoot,
    Verdict,
    VerdictKind,
    build_psi_grid,
    classify_point,
    dispersion_xi,
    find_unstable_roots,
    lopatinski_residual,
    select_variant,
)
from .state import (
    CaseFlag,
    EquilibriumState,
    classify_case,
    load_state,
    make_interface_state,
    state_from_dict,
    state_to_dict,
    validate_equilibrium,
)

__version__ = "0.1.0"
