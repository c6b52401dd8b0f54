"""Spike-and-wave discharge detection in multichannel EEG.

Pipeline: sliding windows -> real Morlet CWT over 1-3 Hz -> [GGD scale,
variance, median] of the coefficients -> k-nearest-neighbour vote.
"""

from .classifier import (
    KernelBayesModel,
    KnnModel,
    TrainingSet,
    build_knn,
    class_density,
    classify_kernel,
    classify_knn,
    fit_scaling,
    knn_limit_check,
    load_model,
    posterior_ratio,
    posteriors,
    save_model,
)
from .features import FeatureVector, check_class_envelope, extract_features, load_features_csv, save_features_csv
from .ggd import GgdParams, fit_ggd_mle, ggd_logpdf, sample_ggd
from .harness import EvalReport, FeatureConfig, augment_patient, evaluate, featurize_recording, run_pipeline, train
from .morlet import ScaleGrid, WaveletCoefficients, build_scale_grid, cwt, morlet_psi
from .segmenter import Segment, WindowSpec, segment_channel
from .signal import Annotation, ClassLabel, EegRecording, load_annotations_json, load_recording_csv, save_recording_csv
from .synthgen import SynthSpec, gen_background_channel, gen_dataset, gen_swd_channel

__version__ = "0.1.0"
