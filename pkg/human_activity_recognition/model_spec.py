import copy
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from .constants import NUM_CLASSES
from .exceptions import ConfigError, InputContractViolation, UnknownModelKind

CLASSICAL_KINDS = ("svm", "knn", "gbdt", "lr", "dt", "rf", "adaboost", "gaussian_nb", "mlp")
NEURAL_KINDS = ("resnet", "transformer", "lstm", "bilstm", "lstm_attention", "cnn1d", "mrnet")
MODEL_KINDS = CLASSICAL_KINDS + NEURAL_KINDS

# representations each kind consumes, exactly
KIND_INPUTS = {
    **{kind: ("statistical",) for kind in CLASSICAL_KINDS},
    "resnet": ("spectral",),
    "transformer": ("temporal",),
    "lstm": ("temporal",),
    "bilstm": ("temporal",),
    "lstm_attention": ("temporal",),
    "cnn1d": ("temporal",),
    "mrnet": ("temporal", "statistical", "spectral"),
}

HEAD_WIDTHS = [256, 128]

DEFAULT_HYPERPARAMETERS = {
    "svm": {"regularization": 1e-4, "iterations": 500, "learning_rate": 1.0},
    "knn": {"k": 5, "workers": 1},
    "gbdt": {"rounds": 100, "max_depth": 3, "learning_rate": 0.1},
    "lr": {"iterations": 1000, "learning_rate": 0.01},
    "dt": {"max_depth": None, "min_samples_split": 2},
    "rf": {"trees": 100, "max_features": "sqrt", "max_depth": None, "bootstrap": True},
    "adaboost": {"rounds": 50},
    "gaussian_nb": {"var_smoothing": 1e-9},
    "mlp": {"hidden": [128, 64], "epochs": 200, "learning_rate": 0.001, "batch_size": 64},
    "resnet": {"channels": [16, 32, 64, 128], "strides": [1, 2, 2, 2], "kernel_size": 3, "head": HEAD_WIDTHS},
    "transformer": {"width": 64, "heads": 8, "layers": 2, "feed_forward": 128, "head": HEAD_WIDTHS},
    "lstm": {"hidden": 64, "head": HEAD_WIDTHS},
    "bilstm": {"hidden": 64, "layers": 2, "head": HEAD_WIDTHS},
    "lstm_attention": {"hidden": 64, "layers": 2, "attention_width": 64, "head": HEAD_WIDTHS},
    "cnn1d": {"filters": [64, 32], "kernel_size": 3, "pool": 2, "head": HEAD_WIDTHS},
    "mrnet": {
        "lstm_hidden": 64,
        "dense": 64,
        "conv_channels": [16, 32],
        "conv_strides": [2, 2],
        "kernel_size": 3,
        "head": HEAD_WIDTHS,
    },
}


@dataclass(frozen=True)
class InputShape:
    """Window length S, channel count C and number of CWT scales K."""
    window_size: int
    channels: int
    scales: int = 0


@dataclass
class ModelSpec:
    """
    Declarative description of one classifier configuration.
    Hyperparameters not given fall back to the per-kind defaults.
    """
    kind: str
    hyperparameters: Dict = field(default_factory=dict)
    input_features: Optional[Tuple[str, ...]] = None
    num_classes: int = NUM_CLASSES
    input_shape: Optional[InputShape] = None

    def __post_init__(self):
        self.kind = str(self.kind).strip().lower()

        if self.kind not in MODEL_KINDS:
            raise UnknownModelKind(f"unknown model kind '{self.kind}', expected one of {MODEL_KINDS}")

        unknown = set(self.hyperparameters) - set(DEFAULT_HYPERPARAMETERS[self.kind])

        if unknown:
            raise ConfigError(f"unknown {self.kind} hyperparameters: {sorted(unknown)}")

        merged = copy.deepcopy(DEFAULT_HYPERPARAMETERS[self.kind])
        merged.update(copy.deepcopy(self.hyperparameters))
        self.hyperparameters = merged

        if self.input_features is None:
            self.input_features = KIND_INPUTS[self.kind]

        self.input_features = tuple(self.input_features)

    @property
    def is_neural(self) -> bool:
        return self.kind in NEURAL_KINDS

    def validate(self) -> "ModelSpec":
        """
        Raises:
            InputContractViolation: if the declared inputs differ from what the kind consumes.
            ConfigError: if a neural kind has no input shape or the class count is below 2.
        """
        if set(self.input_features) != set(KIND_INPUTS[self.kind]) or len(self.input_features) != len(KIND_INPUTS[self.kind]):
            raise InputContractViolation(
                f"{self.kind} consumes {list(KIND_INPUTS[self.kind])}, spec declares {list(self.input_features)}"
            )

        if self.num_classes < 2:
            raise ConfigError(f"a classifier needs at least 2 classes, got {self.num_classes}")

        if self.is_neural and self.input_shape is None:
            raise ConfigError(f"{self.kind} needs the input shape (window, channels, scales) to be built")

        if "spectral" in self.input_features and self.input_shape is not None and self.input_shape.scales < 1:
            raise ConfigError(f"{self.kind} consumes scalograms but the input shape has no scales")

        return self

    def with_input_shape(self, input_shape: InputShape, num_classes: int) -> "ModelSpec":
        return ModelSpec(
            kind=self.kind,
            hyperparameters=copy.deepcopy(self.hyperparameters),
            input_features=self.input_features,
            num_classes=num_classes,
            input_shape=input_shape,
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "hyperparameters": copy.deepcopy(self.hyperparameters),
            "input_features": list(self.input_features),
            "num_classes": self.num_classes,
            "input_shape": None if self.input_shape is None else {
                "window_size": self.input_shape.window_size,
                "channels": self.input_shape.channels,
                "scales": self.input_shape.scales,
            },
        }

    @classmethod
    def from_dict(cls, document: Union[str, dict]) -> "ModelSpec":
        """Accepts a bare kind string or a `{kind, hyperparameters, ...}` mapping."""
        if isinstance(document, str):
            return cls(kind=document)

        unknown = set(document) - {"kind", "hyperparameters", "input_features", "num_classes", "input_shape"}

        if unknown:
            raise ConfigError(f"unknown model keys: {sorted(unknown)}")

        if "kind" not in document:
            raise ConfigError("model entry is missing its kind")

        input_shape = document.get("input_shape")

        return cls(
            kind=document["kind"],
            hyperparameters=dict(document.get("hyperparameters") or {}),
            input_features=document.get("input_features"),
            num_classes=document.get("num_classes", NUM_CLASSES),
            input_shape=None if input_shape is None else InputShape(**input_shape),
        )
