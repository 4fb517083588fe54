"""Adam training with early stopping, plus evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import N_CLASSES, NetworkParams, forward_batch, backward_batch

CE_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 32
    epochs: int = 20
    early_stop_patience: int = 5
    dropout_rate: float = 0.4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class AdamState:
    m: NetworkParams
    v: NetworkParams
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params: NetworkParams) -> "AdamState":
        return cls(m=params.zeros_like(), v=params.zeros_like())


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """-log(p[label] + eps); the eps keeps a zero probability finite."""
    return float(-np.log(probs[label] + CE_EPS))


def batch_cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    picked = probs[np.arange(probs.shape[0]), labels]
    return float(-np.log(picked + CE_EPS).mean())


def adam_step(
    params: NetworkParams, grads: NetworkParams, state: AdamState, lr: float
) -> tuple[NetworkParams, AdamState]:
    """Standard Adam with bias correction, updating params in place."""
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t
    for p, g, m, v in zip(params.tensors(), grads.tensors(), state.m.tensors(), state.v.tensors()):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / corr1
        v_hat = v / corr2
        p -= lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


def split_dataset(
    n: int, seed: int, fractions: tuple[float, float, float] = (0.70, 0.15, 0.15)
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded shuffled index split into train/val/test."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    return order[:n_train], order[n_train : n_train + n_val], order[n_train + n_val :]


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_acc: float


@dataclass
class TrainResult:
    params: NetworkParams
    history: list[EpochRecord]
    stopped_early: bool
    best_epoch: int


def _eval_loss_acc(params: NetworkParams, x: np.ndarray, y: np.ndarray, batch: int = 256):
    losses = []
    correct = 0
    for start in range(0, len(x), batch):
        xb, yb = x[start : start + batch], y[start : start + batch]
        probs, _ = forward_batch(params, xb, train=False)
        picked = probs[np.arange(len(yb)), yb]
        losses.append(-np.log(picked + CE_EPS))
        correct += int((probs.argmax(axis=1) == yb).sum())
    loss = float(np.concatenate(losses).mean()) if losses else 0.0
    acc = correct / len(x) if len(x) else 0.0
    return loss, acc


def train(
    params: NetworkParams,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    x_val: np.ndarray | None = None,
    y_val: np.ndarray | None = None,
) -> TrainResult:
    """Minimize cross-entropy with Adam; early-stop on validation loss.

    Deterministic for a fixed config seed: shuffling and dropout masks come
    from one generator. The best-validation parameters are restored at the
    end. Without a validation set, runs all epochs (val columns mirror the
    train split).
    """
    if len(x) == 0:
        raise ValueError("empty training set")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x_val is None:
        x_val, y_val = x, y
        patience = None
    else:
        x_val = np.asarray(x_val, dtype=np.float64)
        y_val = np.asarray(y_val, dtype=np.int64)
        patience = config.early_stop_patience

    rng = np.random.default_rng(config.seed)
    state = AdamState.for_params(params)
    history: list[EpochRecord] = []
    best_loss = np.inf
    best_params = params.clone()
    best_epoch = 0
    bad_epochs = 0
    stopped_early = False

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(x))
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            probs, cache = forward_batch(params, x[idx], train=True, rng=rng)
            loss = batch_cross_entropy(probs, y[idx])
            if not np.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at epoch {epoch}")
            grads = backward_batch(params, cache, y[idx])
            params, state = adam_step(params, grads, state, config.learning_rate)
            epoch_losses.append(loss)
        val_loss, val_acc = _eval_loss_acc(params, x_val, y_val)
        history.append(
            EpochRecord(
                epoch=epoch,
                train_loss=float(np.mean(epoch_losses)),
                val_loss=val_loss,
                val_acc=val_acc,
            )
        )
        if val_loss < best_loss - 1e-12:
            best_loss = val_loss
            best_params = params.clone()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if patience is not None and bad_epochs >= patience:
                stopped_early = True
                break
    return TrainResult(
        params=best_params, history=history, stopped_early=stopped_early, best_epoch=best_epoch
    )


@dataclass
class EvalMetrics:
    accuracy: float
    precision: np.ndarray  # (6,)
    recall: np.ndarray  # (6,)
    f1: np.ndarray  # (6,)
    confusion: np.ndarray  # (6, 6) rows=true, cols=predicted
    false_positive_rate: float


def evaluate(
    params: NetworkParams,
    x: np.ndarray,
    y: np.ndarray,
    negatives: np.ndarray | None = None,
    accept_threshold: float = 0.75,
) -> EvalMetrics:
    """Argmax metrics plus the command false-positive rate.

    A false positive is an input the pipeline would act on wrongly: a
    positive sample accepted (confidence >= threshold) with the wrong
    class, or a negative (no-gesture) sample accepted at all. The rate is
    over all inputs seen.
    """
    y = np.asarray(y, dtype=np.int64)
    probs, _ = forward_batch(params, np.asarray(x, dtype=np.float64), train=False)
    pred = probs.argmax(axis=1)
    conf = probs.max(axis=1)
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(confusion, (y, pred), 1)
    tp = np.diag(confusion).astype(np.float64)
    col = confusion.sum(axis=0).astype(np.float64)
    row = confusion.sum(axis=1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(col > 0, tp / col, 0.0)
        recall = np.where(row > 0, tp / row, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    accuracy = float((pred == y).mean())

    wrong_accepts = int(((pred != y) & (conf >= accept_threshold)).sum())
    total = len(y)
    neg_accepts = 0
    if negatives is not None and len(negatives):
        nprobs, _ = forward_batch(params, np.asarray(negatives, dtype=np.float64), train=False)
        neg_accepts = int((nprobs.max(axis=1) >= accept_threshold).sum())
        total += len(negatives)
    fpr = (wrong_accepts + neg_accepts) / total if total else 0.0
    return EvalMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        confusion=confusion,
        false_positive_rate=fpr,
    )
