from dataclasses import dataclass


def normalize_class_name(name: str) -> str:
    """Case-insensitive, whitespace-trimmed key used to match activity names."""
    return " ".join(str(name).strip().split()).casefold()


@dataclass(frozen=True, order=True)
class ActivityLabel:
    class_index: int
    class_name: str

    def __repr__(self) -> str:
        return f"ActivityLabel({self.class_index}, {self.class_name!r})"
