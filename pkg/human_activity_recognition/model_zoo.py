import json
import logging
from os import makedirs, replace
from os.path import dirname, expanduser
from typing import Optional, Sequence, Union

import colored_logging as cl
import numpy as np
from scipy import special

from .checkpoint import load_checkpoint, save_checkpoint
from .classical_classifier import CLASSICAL_CLASSIFIERS, ClassicalClassifier
from .classifier_output import ClassifierOutput
from .constants import CLASSICAL_FORMAT_VERSION, PROBABILITY_FLOOR
from .exceptions import CheckpointError, UnsupportedOperation
from .feature_bundle import FeatureBundle
from .feature_store import FeatureBatch
from .model_spec import ModelSpec
from .neural_classifiers import NeuralClassifier, build_network
from .tensor import no_grad
from .tensor_ops import l2_normalize

# classical kinds register themselves on import
from . import decision_tree, gaussian_naive_bayes, KNN, linear_classifiers, tree_ensembles  # noqa: F401

logger = logging.getLogger(__name__)

Model = Union[ClassicalClassifier, NeuralClassifier]
BatchLike = Union[FeatureBatch, Sequence[FeatureBundle]]

EVALUATION_CHUNK = 256


def build(spec: ModelSpec, seed: int = 0) -> Model:
    """
    Instantiate an untrained model of `spec.kind` with deterministic initial parameters.

    Raises:
        UnknownModelKind: raised by ModelSpec for kinds outside the zoo.
        InputContractViolation: if the spec's input features differ from what the kind consumes.
    """
    spec.validate()

    if spec.is_neural:
        model = build_network(spec, seed=seed)
        logger.info(f"built {cl.name(spec.kind)} with {cl.val(model.num_parameters())} parameters")
        return model

    model = CLASSICAL_CLASSIFIERS[spec.kind](spec.hyperparameters, spec.num_classes, seed=seed)
    logger.info(f"built {cl.name(spec.kind)}")

    return model


def as_batch(batch: BatchLike) -> FeatureBatch:
    if isinstance(batch, FeatureBatch):
        return batch

    return FeatureBatch.from_bundles(list(batch))


def fit_classical(model: ClassicalClassifier, features: np.ndarray, labels: np.ndarray) -> ClassicalClassifier:
    if not isinstance(model, ClassicalClassifier):
        raise UnsupportedOperation(f"{model.kind} is trained through the training loop, not fit_classical")

    return model.fit(features, labels)


def _neural_forward(model: NeuralClassifier, batch: FeatureBatch, normalize: bool = False):
    logits, embeddings = [], []
    was_training = model.training
    model.eval()

    try:
        with no_grad():
            for start in range(0, len(batch), EVALUATION_CHUNK):
                chunk = batch.take(np.arange(start, min(start + EVALUATION_CHUNK, len(batch))))
                chunk_logits, chunk_embedding = model.logits_and_embedding(chunk)

                if normalize:
                    chunk_embedding = l2_normalize(chunk_embedding, axis=1)

                logits.append(chunk_logits.values)
                embeddings.append(chunk_embedding.values)
    finally:
        model.train(was_training)

    return np.concatenate(logits, axis=0), np.concatenate(embeddings, axis=0)


def forward(model: Model, batch: BatchLike) -> ClassifierOutput:
    """
    Evaluation-mode outputs for every item of the batch.

    Raises:
        MissingRepresentation: if the batch lacks a representation the model consumes.
    """
    batch = as_batch(batch)

    if isinstance(model, NeuralClassifier):
        logits, embedding = _neural_forward(model, batch)

        return ClassifierOutput(logits=logits, probabilities=special.softmax(logits, axis=1), embedding=embedding)

    features = batch.representation("statistical")
    logits = np.log(np.maximum(model.predict_proba(features), PROBABILITY_FLOOR))

    return ClassifierOutput(
        logits=logits,
        probabilities=special.softmax(logits, axis=1),
        predicted=model.predict(features),
    )


def embed(model: Model, batch: BatchLike, normalize: bool = False) -> np.ndarray:
    """Penultimate-layer embeddings [N x 128], optionally L2-normalized."""
    if not isinstance(model, NeuralClassifier):
        raise UnsupportedOperation(f"{model.kind} is a classical model and has no embedding layer")

    return _neural_forward(model, as_batch(batch), normalize=normalize)[1]


def predict(model: Model, batch: BatchLike) -> np.ndarray:
    return forward(model, batch).predictions


def save_classical_model(filename: str, model: ClassicalClassifier, config_digest: Optional[str] = None) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    document = {
        "format_version": CLASSICAL_FORMAT_VERSION,
        "kind": model.kind,
        "num_classes": model.num_classes,
        "seed": model.seed,
        "hyperparameters": model.hyperparameters,
        "config_digest": config_digest,
        "state": model.state(),
    }
    temporary = f"{filename}.tmp"

    with open(temporary, "w") as file:
        json.dump(document, file, sort_keys=True)

    replace(temporary, filename)
    logger.info(f"wrote {cl.name(model.kind)} model to {cl.dir(filename)}")

    return filename


def load_classical_model(filename: str, expected_digest: Optional[str] = None) -> ClassicalClassifier:
    filename = expanduser(filename)

    try:
        with open(filename, "r") as file:
            document = json.load(file)
    except (OSError, ValueError) as e:
        raise CheckpointError(f"unable to read classical model {filename}: {e}") from e

    if document.get("format_version") != CLASSICAL_FORMAT_VERSION:
        raise CheckpointError(f"unsupported classical model format {document.get('format_version')} in {filename}")

    if document.get("kind") not in CLASSICAL_CLASSIFIERS:
        raise CheckpointError(f"unknown classical model kind {document.get('kind')!r} in {filename}")

    if expected_digest is not None and document.get("config_digest") != expected_digest:
        raise CheckpointError(f"model {filename} was trained under config {document.get('config_digest')}, expected {expected_digest}")

    model = CLASSICAL_CLASSIFIERS[document["kind"]](document["hyperparameters"], document["num_classes"], seed=document["seed"])
    model.load_state(document["state"])
    model.fitted = True

    return model


def save_neural_model(filename: str, model: NeuralClassifier, config_digest: str) -> str:
    return save_checkpoint(filename, model.state_dict(), config_digest)


def load_neural_model(filename: str, spec: ModelSpec, expected_digest: Optional[str] = None) -> NeuralClassifier:
    state, _ = load_checkpoint(filename, expected_digest=expected_digest)
    model = build_network(spec)
    model.load_state_dict(state)

    return model.eval()

