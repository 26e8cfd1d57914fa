"""Common and sensor-specific latent variables from two simultaneous sensors."""

from ._accel import backend
from .alternating import ad_kernel, common_embedding, common_kernel, sensor_kernel
from .diffusion import Embedding, column_distances, diffusion_map, spectral_decompose
from .kernels import (
    SampleSet,
    StochasticMatrix,
    adaptive_scales,
    column_normalize,
    gaussian_affinity,
    pairwise_sq_dists,
)
from .params import PRESETS, PipelineParams
from .pipeline import FusionResult, analyze
from .specific import (
    LocalGaussian,
    LocalStats,
    NeighborhoodIndex,
    local_stats,
    mahalanobis_affinity,
    mahalanobis_forms,
    neighborhoods,
    specific_embedding,
    truncated_pinv,
)
from .synthetic import TorusParams, generate_tori_dataset, linear_multimodal, sample_hidden, torus_observe
from .timeseries import lag_map, load_two_channel_csv, surrogate_ecg
from .validation import check_theorem1, check_theorem2, circular_correlation, dft_peak

__version__ = "0.1.0"
