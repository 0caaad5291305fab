"""Nonadiabatic holonomic braiding of Majorana zero modes in driven Kitaev
chains: BdG lattice simulation, analytic gate layer, error channels, and
reproducible experiment scenarios."""

from .lattice import (
    ChainParams,
    GaussianPerturbation,
    MajoranaMode,
    SystemSpec,
    build_static_bdg,
    bulk_gap,
    extract_majorana_modes,
    nambu_overlap,
    phs_conjugate,
)
from .drive import (
    DriveCoefficients,
    DriveProtocol,
    PhaseSchedule,
    PulseEnvelope,
    Segment,
    TruncationSpec,
    build_drive_bdg,
    calibrate_pulse_area,
    envelope_value,
    make_braid_protocol,
    make_composite_protocol,
    make_pi8_protocol,
    reverse_protocol,
)
from .evolution import (
    FidelitySeries,
    IntegratorConfig,
    NumericalFailure,
    evolve,
    fidelity,
    project_gate,
)
from .gates import (
    composite_gate,
    distorted_params,
    error_scaling_scan,
    gate_distance,
    holonomic_gate,
    segment_gate,
    three_level_evolve,
)
from .errors import (
    RandomSiteError,
    SystematicCoeffError,
    apply_site_errors,
    apply_systematic,
    apply_truncation,
    sample_site_errors,
)

__version__ = "0.1.0"
