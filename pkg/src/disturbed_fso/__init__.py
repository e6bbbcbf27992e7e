"""Optical attenuation of ground/satellite links in a nuclear-disturbed atmosphere,
and its effect on Bayesian estimates of transmitted two-qubit entanglement."""

from .disturbed import (
    AtmosphericColumn,
    HazeScenario,
    Layer,
    ParticleSizeDistribution,
    StabilizedCloud,
    cloud_for_yield,
    column_attenuation,
    gaussian_puff_column,
    haze_attenuation,
    lognormal_size_classes,
    stabilized_cloud_attenuation,
)
from .experiment import ExperimentConfig, simulate_dataset, sweep_attenuation
from .link_budget import (
    LinkGeometry,
    LossLedger,
    TurbulenceProfile,
    atmospheric_divergence,
    beam_divergence,
    beam_waist_at,
    channel_attenuation,
    combine_losses_logsum,
    combine_losses_serial,
    fried_parameter,
    hv_structure_constant,
    link_attenuation,
    reference_geometry,
)
from .mie import ComplexRefractiveIndex, MieEfficiencies, MieResolutionError, mie_efficiencies, size_parameter
from .quantum import (
    DensityMatrixParams,
    MeasurementDataset,
    born_probabilities,
    cholesky_factor,
    concurrence,
    entanglement_of_formation,
    full_likelihood,
    single_basis_likelihood,
)
from .sampler import SamplerConfig, slice_sample_posterior

__version__ = "0.1.0"
