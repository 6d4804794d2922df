"""Spectral laboratory for the free Schrodinger propagator on T^m x R^n:
mixed transforms, exact multiplier evolution, function-space norms,
paraboloid cap decompositions, semiclassical wave packets, and a log-log
scaling-experiment harness."""

from .domain import (
    DomainSpec,
    Field,
    FieldCache,
    Spectrum,
    TimePlan,
    Trajectory,
    load_field,
    make_domain,
    padded_samples,
    save_field,
    to_field,
    to_spectrum,
)
from .propagator import ExtensionData, evolve_trajectory, extension_apply, propagate
from .norms import (
    DyadicFamily,
    NormParams,
    PartitionOfUnity,
    bessel_multiplier,
    box_project,
    build_dyadic,
    build_partition,
    lp_project,
    lp_space_norm,
    mixed_norm,
    mixed_norm_evolved,
    modulation_norm,
    sobolev_norm,
)
from .decoupling import (
    Cap,
    CapCover,
    NeighborhoodData,
    build_taper,
    cap_cover,
    cap_restrict,
    decoupling_ratio,
    extension_lp_norm,
    random_neighborhood,
)
from .extremizers import (
    Packet1D,
    PacketParams,
    ProfileSpec,
    build_profile,
    calibrate_eps0,
    extremizer_part_i,
    extremizer_part_ii,
    single_cap_data,
    tensor_evolution_lp,
    wavepacket_euclid,
    wavepacket_torus,
)
from .scaling import (
    ExperimentConfig,
    ScalingReport,
    SeriesResult,
    fit_exponent,
    load_config,
    random_band_limited,
    rescaling_pair,
    run_experiment,
    threshold_table,
    write_report,
)

__version__ = "0.1.0"
