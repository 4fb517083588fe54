"""From-scratch neural gesture classifier: conv/pool/dense layers with
ReLU and softmax, Adam training, and binary checkpoints."""

from .network import (
    N_CLASSES,
    ConvLayer,
    DenseLayer,
    NetworkParams,
    Prediction,
    backward_batch,
    forward_batch,
    full_resolution_network,
    landmark_network,
    predict,
    raster_network,
    tiny_test_network,
)
from .training import (
    AdamState,
    EpochRecord,
    EvalMetrics,
    TrainConfig,
    TrainResult,
    adam_step,
    batch_cross_entropy,
    cross_entropy,
    evaluate,
    split_dataset,
    train,
)
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint, save_history_csv

__all__ = [
    "AdamState",
    "CheckpointError",
    "ConvLayer",
    "DenseLayer",
    "EpochRecord",
    "EvalMetrics",
    "N_CLASSES",
    "NetworkParams",
    "Prediction",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "backward_batch",
    "batch_cross_entropy",
    "cross_entropy",
    "evaluate",
    "forward_batch",
    "full_resolution_network",
    "landmark_network",
    "load_checkpoint",
    "predict",
    "raster_network",
    "save_checkpoint",
    "save_history_csv",
    "split_dataset",
    "tiny_test_network",
    "train",
]
