from dataclasses import dataclass

from .constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS_CE,
    DEFAULT_EPOCHS_PRETRAIN,
    DEFAULT_LEARNING_RATE,
    DEFAULT_SEED,
    DEFAULT_TEMPERATURE,
    DEFAULT_TRIPLET_MARGIN,
    PREFETCH_CAPACITY,
    SCHEDULES,
)
from .exceptions import ConfigError

# command-line shorthand for the schedules
SCHEDULE_ALIASES = {
    "ce": "ce_only",
    "supcon": "supcon_then_ce",
    "triplet": "triplet_then_ce",
}


def resolve_schedule(schedule: str) -> str:
    schedule = SCHEDULE_ALIASES.get(str(schedule).strip().lower(), str(schedule).strip().lower())

    if schedule not in SCHEDULES:
        raise ConfigError(f"schedule must be one of {SCHEDULES} or {tuple(SCHEDULE_ALIASES)}, got '{schedule}'")

    return schedule


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs_ce: int = DEFAULT_EPOCHS_CE
    epochs_pretrain: int = DEFAULT_EPOCHS_PRETRAIN
    batch_size: int = DEFAULT_BATCH_SIZE
    temperature: float = DEFAULT_TEMPERATURE
    triplet_margin: float = DEFAULT_TRIPLET_MARGIN
    seed: int = DEFAULT_SEED
    schedule: str = "ce_only"
    prefetch: int = PREFETCH_CAPACITY

    def __post_init__(self):
        object.__setattr__(self, "schedule", resolve_schedule(self.schedule))

    @property
    def pretrain_loss(self):
        """'supcon', 'triplet' or None for cross-entropy only."""
        return {"ce_only": None, "supcon_then_ce": "supcon", "triplet_then_ce": "triplet"}[self.schedule]

    def validate(self) -> "TrainConfig":
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")
        if self.triplet_margin < 0:
            raise ConfigError(f"triplet margin must be non-negative, got {self.triplet_margin}")
        if self.epochs_ce < 1:
            raise ConfigError(f"cross-entropy epochs must be at least 1, got {self.epochs_ce}")
        if self.pretrain_loss is not None and self.epochs_pretrain < 1:
            raise ConfigError(f"pretraining epochs must be at least 1, got {self.epochs_pretrain}")
        if self.batch_size < 2:
            raise ConfigError(f"batch size must be at least 2, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.prefetch < 0:
            raise ConfigError(f"prefetch capacity must be non-negative, got {self.prefetch}")

        return self

    def replace(self, **changes) -> "TrainConfig":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)

        return TrainConfig(**values).validate()

    @classmethod
    def from_dict(cls, document: dict) -> "TrainConfig":
        unknown = set(document) - set(cls.__dataclass_fields__)

        if unknown:
            raise ConfigError(f"unknown training keys: {sorted(unknown)}")

        return cls(**document).validate()
