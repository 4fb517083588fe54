"""Shared fixtures: trained models reused across the suite.

The full-budget models match the default training recipe (6x1500
samples, lr 0.001, batch 32, up to 20 epochs, dropout 0.4) and are
trained once per session; the quick model is for loop-plumbing tests.
"""

import time

import numpy as np
import pytest

from gestlink.gesturenet import (
    TrainConfig,
    evaluate,
    landmark_network,
    raster_network,
    train,
)
from gestlink.perception import DatasetSpec, generate_dataset

ACCEPT_SEED = 2024


@pytest.fixture(scope="session")
def quick_landmark_model():
    """A fast-trained landmark classifier, good enough for loop tests."""
    ds = generate_dataset(DatasetSpec(per_class=300, seed=7))
    feats = ds.features()
    tr, va = ds.split["train"], ds.split["val"]
    result = train(
        landmark_network(seed=7),
        feats[tr],
        ds.labels[tr],
        TrainConfig(seed=7, epochs=10),
        feats[va],
        ds.labels[va],
    )
    return result.params


@pytest.fixture(scope="session")
def full_landmark_training():
    """Default-recipe landmark training; returns (params, test_acc, wall_s)."""
    ds = generate_dataset(DatasetSpec(per_class=1500, seed=ACCEPT_SEED))
    feats = ds.features()
    tr, va, te = ds.split["train"], ds.split["val"], ds.split["test"]
    config = TrainConfig(seed=ACCEPT_SEED)
    net = landmark_network(seed=ACCEPT_SEED, dropout_rate=config.dropout_rate)
    t0 = time.time()
    result = train(net, feats[tr], ds.labels[tr], config, feats[va], ds.labels[va])
    wall = time.time() - t0
    metrics = evaluate(result.params, feats[te], ds.labels[te])
    return result.params, metrics.accuracy, wall


@pytest.fixture(scope="session")
def full_raster_training():
    """Matched-budget raster training on noisy 32x32 skeleton frames."""
    ds = generate_dataset(
        DatasetSpec(per_class=1500, seed=ACCEPT_SEED, raster_side=32, background_noise=0.3)
    )
    x = ds.raster_tensors()
    tr, va, te = ds.split["train"], ds.split["val"], ds.split["test"]
    config = TrainConfig(seed=ACCEPT_SEED)
    net = raster_network(seed=ACCEPT_SEED, dropout_rate=config.dropout_rate)
    t0 = time.time()
    result = train(net, x[tr], ds.labels[tr], config, x[va], ds.labels[va])
    wall = time.time() - t0
    metrics = evaluate(result.params, x[te], ds.labels[te])
    return result.params, metrics.accuracy, wall
