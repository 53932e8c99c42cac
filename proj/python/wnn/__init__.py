"""Wavelet energy features and a Levenberg-Marquardt trained network for EEG classification."""

import numpy as np

from ._core import (
    BONN_SAMPLING_RATE,
    CLASSES,
    FEATURE_NAMES,
    Network,
    WnnError,
    accuracies,
    band_table,
    class_target,
    db4_highpass,
    db4_lowpass,
    decompose,
    dwt_step,
    evaluate,
    extract_features,
    format_report,
    load_bonn,
    nearest_class,
    reconstruct,
    split_indices,
    synth_corpus,
)


def featurize(segments, sampling_rate=BONN_SAMPLING_RATE):
    """Feature matrix (N x 6) and label list for segment dicts."""
    features = np.array([extract_features(s["samples"], sampling_rate) for s in segments])
    return features, [s["label"] for s in segments]


__all__ = [name for name in dir() if not name.startswith("_") and name != "np"]
