"""Gender classification from fingerprint-like grayscale images.

The pipeline fuses two per-image features, the mean-absolute energies of
a multilevel 2-D wavelet decomposition and the full singular-value
spectrum of the raw image matrix, and classifies the fused vector with a
k-nearest-neighbor vote over a persistent labeled feature database.
"""

__version__ = "0.1.0"

from .classifier import Classification, KnnConfig, euclidean_distance, knn_classify
from .dwt import (
    EnergyVector,
    Subband,
    SubbandPyramid,
    decompose,
    dwt2_single_level,
    energy_vector,
    subband_energy,
)
from .evaluate import (
    ClassificationReport,
    ExperimentConfig,
    FingerCell,
    ReportFormat,
    render_report,
    run_experiment,
)
from .features import (
    DatabaseConfig,
    FeatureDatabase,
    FeatureLayout,
    FeatureMode,
    FusedFeature,
    LabeledFeature,
    build_database,
    extract_features,
    load_database,
    save_database,
)
from .image_io import (
    AgeGroup,
    CropRegion,
    DatasetSplit,
    Gender,
    GrayImage,
    SampleMeta,
    crop,
    load_image,
    load_manifest,
    split_dataset,
    write_image,
)
from .svd import SingularSpectrum, singular_values
from .synth import SynthClass, SynthSpec, generate, write_dataset

__all__ = [
    "AgeGroup",
    "Classification",
    "ClassificationReport",
    "CropRegion",
    "DatabaseConfig",
    "DatasetSplit",
    "EnergyVector",
    "ExperimentConfig",
    "FeatureDatabase",
    "FeatureLayout",
    "FeatureMode",
    "FingerCell",
    "FusedFeature",
    "Gender",
    "GrayImage",
    "KnnConfig",
    "LabeledFeature",
    "ReportFormat",
    "SampleMeta",
    "SingularSpectrum",
    "Subband",
    "SubbandPyramid",
    "SynthClass",
    "SynthSpec",
    "build_database",
    "crop",
    "decompose",
    "dwt2_single_level",
    "energy_vector",
    "euclidean_distance",
    "extract_features",
    "generate",
    "knn_classify",
    "load_database",
    "load_image",
    "load_manifest",
    "render_report",
    "run_experiment",
    "save_database",
    "singular_values",
    "split_dataset",
    "subband_energy",
    "write_dataset",
    "write_image",
]
