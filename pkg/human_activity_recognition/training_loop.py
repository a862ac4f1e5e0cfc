"""
Training schedules for the neural classifiers.

ce_only          cross-entropy epochs over the full network
supcon_then_ce   supervised contrastive pretraining of the encoder on L2-normalized embeddings,
                 then cross-entropy epochs over the full network
triplet_then_ce  the same with the triplet loss on raw embeddings

Every phase starts a fresh Adam state. The returned model carries the parameters of the
cross-entropy epoch with the best validation accuracy.
"""
import logging
from dataclasses import dataclass, field
from os import makedirs
from os.path import dirname, expanduser
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import colored_logging as cl
import numpy as np
import pandas as pd

from .adam import AdamState, adam_step
from .batch_sampling import prefetch, sample_batches
from .exceptions import SplitLeakage, TrainingDiverged, UnsupportedOperation
from .feature_store import FeatureBatch, FeatureStore
from .losses import LossValue, ce_loss, supcon_loss, triplet_loss
from .evaluation import accuracy_on
from .neural_classifiers import NeuralClassifier
from .split_assignment import SplitAssignment
from .tensor import backward
from .tensor_ops import getitem, l2_normalize, softmax
from .timer import Timer
from .train_config import TrainConfig

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "phase", "train_loss", "val_accuracy"]
PHASE_SAMPLING = {"supcon": "class_balanced", "triplet": "triplet", "ce": "plain"}


@dataclass
class TrainResult:
    model: NeuralClassifier
    history: pd.DataFrame
    best_epoch: int
    best_val_accuracy: float
    durations: Dict[str, float] = field(default_factory=dict)


def write_history(history: pd.DataFrame, filename: str) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    history.to_csv(filename, index=False, columns=HISTORY_COLUMNS, float_format="%.10g")
    logger.info(f"wrote training history to {cl.dir(filename)}")

    return filename


def epoch_seed(seed: int, phase: str, epoch: int) -> int:
    phase_index = ("pretrain", "ce").index(phase)

    return int(np.random.SeedSequence([seed, phase_index, epoch]).generate_state(1)[0])


def check_batch_ids(batch_ids: np.ndarray, train_ids: set) -> None:
    leaked = [int(item) for item in np.unique(batch_ids) if int(item) not in train_ids]

    if leaked:
        raise SplitLeakage(f"batch holds {len(leaked)} segments outside the training split, e.g. {leaked[:5]}")


def _feature_batches(
        store: FeatureStore,
        id_batches: List[np.ndarray],
        representations: Sequence[str],
        train_ids: set) -> Iterator[Tuple[np.ndarray, FeatureBatch]]:
    for batch_ids in id_batches:
        check_batch_ids(batch_ids, train_ids)
        yield batch_ids, store.batch(batch_ids.reshape(-1), representations)


def _check_finite(loss: LossValue, phase: str, epoch: int, batch_index: int) -> None:
    if not np.isfinite(loss.scalar):
        raise TrainingDiverged(
            f"{phase} loss became {loss.scalar} at epoch {epoch}, batch {batch_index}",
            epoch=epoch,
            batch=batch_index,
        )


def _pretrain_loss(model: NeuralClassifier, batch_ids: np.ndarray, batch: FeatureBatch, loss_name: str, config: TrainConfig) -> LossValue:
    embedding = model.embed(batch)

    if loss_name == "supcon":
        return supcon_loss(l2_normalize(embedding, axis=1), batch.labels, config.temperature)

    # rows of the flattened [b x 3] id table interleave anchor, positive, negative
    count = batch_ids.shape[0]
    anchor = getitem(embedding, np.arange(count) * 3)
    positive = getitem(embedding, np.arange(count) * 3 + 1)
    negative = getitem(embedding, np.arange(count) * 3 + 2)

    return triplet_loss(anchor, positive, negative, config.triplet_margin)


def _step(model: NeuralClassifier, loss: LossValue, state: AdamState) -> None:
    model.zero_grad()
    backward(loss.tensor)
    # parameters outside the loss's graph (the output layer while pretraining) keep their values
    adam_step(model.named_parameters(), model.gradients(), state)


def train(
        model: NeuralClassifier,
        store: FeatureStore,
        split: SplitAssignment,
        config: TrainConfig = None,
        history_filename: Optional[str] = None) -> TrainResult:
    """
    Train a neural classifier on the training split of `store` under `config.schedule`.

    Returns:
        TrainResult: the model restored to its best validation epoch and the per-epoch history.

    Raises:
        UnsupportedOperation: for classical models, which are fitted with fit_classical.
        TrainingDiverged: when a batch loss is not finite; carries the epoch and batch.
        SplitLeakage: when a batch holds a segment outside the training split.
    """
    if not isinstance(model, NeuralClassifier):
        raise UnsupportedOperation(f"{getattr(model, 'kind', model)} is not a neural model; use fit_classical")

    if config is None:
        config = TrainConfig()

    config.validate()
    split.check_disjoint()
    representations = model.spec.input_features
    train_ids = np.array(split.train, dtype=np.int64)
    train_set = set(split.train)
    train_labels = store.labels(train_ids)
    rows = []
    durations = {}
    model.train()

    if config.pretrain_loss is not None:
        state = AdamState(learning_rate=config.learning_rate)
        mode = PHASE_SAMPLING[config.pretrain_loss]

        with Timer() as timer:
            for epoch in range(1, config.epochs_pretrain + 1):
                id_batches = sample_batches(train_ids, train_labels, mode, config.batch_size, epoch_seed(config.seed, "pretrain", epoch))
                losses = []

                for batch_index, (batch_ids, batch) in enumerate(prefetch(_feature_batches(store, id_batches, representations, train_set), config.prefetch)):
                    loss = _pretrain_loss(model, batch_ids, batch, config.pretrain_loss, config)
                    _check_finite(loss, "pretrain", epoch, batch_index)
                    _step(model, loss, state)
                    losses.append(loss.scalar)

                val_accuracy = accuracy_on(model, store, split.val)
                rows.append({"epoch": epoch, "phase": "pretrain", "train_loss": float(np.mean(losses)), "val_accuracy": val_accuracy})
                logger.info(
                    f"{cl.name(model.kind)} pretrain ({config.pretrain_loss}) epoch {cl.val(epoch)}/{config.epochs_pretrain} "
                    f"loss {cl.val(f'{np.mean(losses):.4f}')}"
                )

        durations["pretrain"] = timer.duration

    state = AdamState(learning_rate=config.learning_rate)
    best_epoch, best_accuracy, best_state = 0, -np.inf, None

    with Timer() as timer:
        for epoch in range(1, config.epochs_ce + 1):
            id_batches = sample_batches(train_ids, train_labels, "plain", config.batch_size, epoch_seed(config.seed, "ce", epoch))
            losses = []

            for batch_index, (_, batch) in enumerate(prefetch(_feature_batches(store, id_batches, representations, train_set), config.prefetch)):
                loss = ce_loss(softmax(model(batch), axis=1), batch.labels)
                _check_finite(loss, "cross-entropy", epoch, batch_index)
                _step(model, loss, state)
                losses.append(loss.scalar * len(batch))

            train_loss = float(np.sum(losses) / len(train_ids))
            val_accuracy = accuracy_on(model, store, split.val)
            rows.append({"epoch": epoch, "phase": "ce", "train_loss": train_loss, "val_accuracy": val_accuracy})
            logger.info(
                f"{cl.name(model.kind)} epoch {cl.val(epoch)}/{config.epochs_ce} "
                f"loss {cl.val(f'{train_loss:.4f}')} validation accuracy {cl.val(f'{val_accuracy:.4f}')}"
            )

            # without a validation split the last epoch wins
            score = -np.inf if np.isnan(val_accuracy) else val_accuracy

            if best_state is None or score > best_accuracy or np.isnan(val_accuracy):
                best_epoch, best_accuracy, best_state = epoch, score, model.state_dict()

    durations["ce"] = timer.duration
    model.load_state_dict(best_state)
    model.eval()
    history = pd.DataFrame(rows, columns=HISTORY_COLUMNS)

    if history_filename is not None:
        write_history(history, history_filename)

    logger.info(
        f"{cl.name(model.kind)} best validation accuracy {cl.val(f'{best_accuracy:.4f}')} at epoch {cl.val(best_epoch)} "
        f"({cl.time(f'{sum(durations.values()):0.2f}')} seconds)"
    )

    return TrainResult(
        model=model,
        history=history,
        best_epoch=best_epoch,
        best_val_accuracy=float(best_accuracy) if np.isfinite(best_accuracy) else float("nan"),
        durations=durations,
    )
