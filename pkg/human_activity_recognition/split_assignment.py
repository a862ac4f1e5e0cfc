import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import colored_logging as cl
import numpy as np

from .constants import MIN_SEGMENTS_PER_CLASS, MIN_USERS_BY_USER, SPLIT_RATIOS, SPLIT_STRATEGIES
from .exceptions import ConfigError, InsufficientSegments, SplitLeakage
from .segments import Segment

logger = logging.getLogger(__name__)


@dataclass
class SplitAssignment:
    """Disjoint train/validation/test segment ids covering the whole segment set."""
    train: List[int] = field(default_factory=list)
    val: List[int] = field(default_factory=list)
    test: List[int] = field(default_factory=list)
    seed: int = 0
    strategy: str = "segment_stratified"

    def __post_init__(self):
        self.train = sorted(int(item) for item in self.train)
        self.val = sorted(int(item) for item in self.val)
        self.test = sorted(int(item) for item in self.test)

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return len(self.train), len(self.val), len(self.test)

    def check_disjoint(self) -> None:
        train, val, test = set(self.train), set(self.val), set(self.test)
        overlap = (train & val) | (train & test) | (val & test)

        if overlap:
            raise SplitLeakage(f"{len(overlap)} segment ids appear in more than one split, e.g. {sorted(overlap)[:5]}")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "train": list(self.train),
            "val": list(self.val),
            "test": list(self.test),
        }


def split_quota(n: int, ratios: Sequence[float]) -> Tuple[int, int, int]:
    """(train, val, test) counts for n items; rounding half up, remainder to test."""
    train = int(np.floor(ratios[0] * n + 0.5))
    val = int(np.floor(ratios[1] * n + 0.5))
    val = min(val, n - train)

    return train, val, n - train - val


def check_ratios(ratios: Sequence[float]) -> Tuple[float, float, float]:
    ratios = tuple(float(ratio) for ratio in ratios)

    if len(ratios) != 3 or any(ratio < 0 for ratio in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must be three non-negative fractions summing to 1, got {ratios}")

    return ratios


def _segment_stratified(segments: List[Segment], ratios, seed: int) -> SplitAssignment:
    by_class: Dict[int, List[Segment]] = defaultdict(list)

    for item in segments:
        by_class[item.label.class_index].append(item)

    for class_index in sorted(by_class):
        if len(by_class[class_index]) < MIN_SEGMENTS_PER_CLASS:
            name = by_class[class_index][0].label.class_name
            raise InsufficientSegments(
                f"class {name} has {len(by_class[class_index])} segments; "
                f"a stratified split needs at least {MIN_SEGMENTS_PER_CLASS}"
            )

    rng = np.random.default_rng(seed)
    train, val, test = [], [], []

    for class_index in sorted(by_class):
        ids = np.array(sorted(item.id for item in by_class[class_index]), dtype=np.int64)
        ids = rng.permutation(ids)
        n_train, n_val, _ = split_quota(len(ids), ratios)
        train.extend(ids[:n_train].tolist())
        val.extend(ids[n_train:n_train + n_val].tolist())
        test.extend(ids[n_train + n_val:].tolist())

    return SplitAssignment(train=train, val=val, test=test, seed=seed, strategy="segment_stratified")


def _by_user(segments: List[Segment], ratios, seed: int) -> SplitAssignment:
    by_user: Dict[int, List[int]] = defaultdict(list)

    for item in segments:
        by_user[item.user_id].append(item.id)

    if len(by_user) < MIN_USERS_BY_USER:
        raise InsufficientSegments(f"a by-user split needs at least {MIN_USERS_BY_USER} users, got {len(by_user)}")

    rng = np.random.default_rng(seed)
    users = rng.permutation(np.array(sorted(by_user), dtype=np.int64)).tolist()
    # largest users first; the shuffle breaks ties
    users.sort(key=lambda user: -len(by_user[user]))

    total = len(segments)
    targets = np.array(ratios) * total
    counts = np.zeros(3)
    assigned: List[List[int]] = [[], [], []]

    for position, user in enumerate(users):
        remaining = len(users) - position
        empty = [index for index in range(3) if not assigned[index] and ratios[index] > 0]

        if len(empty) >= remaining:
            choice = empty[0]
        else:
            deficit = (targets - counts) / np.maximum(targets, 1e-12)
            deficit[np.array(ratios) == 0] = -np.inf
            choice = int(np.argmax(deficit))

        assigned[choice].append(user)
        counts[choice] += len(by_user[user])

    splits = [[segment_id for user in group for segment_id in by_user[user]] for group in assigned]

    logger.info(
        f"by-user split: {cl.val(len(assigned[0]))} train users, {cl.val(len(assigned[1]))} validation users, "
        f"{cl.val(len(assigned[2]))} test users"
    )

    return SplitAssignment(train=splits[0], val=splits[1], test=splits[2], seed=seed, strategy="by_user")


def stratified_split(
        segments: List[Segment],
        ratios: Sequence[float] = SPLIT_RATIOS,
        seed: int = 0,
        strategy: str = "segment_stratified") -> SplitAssignment:
    """
    Assign every segment to exactly one of train, validation and test.

    `segment_stratified` shuffles each class with a seeded generator and cuts it at
    round(0.7 n) and round(0.1 n). `by_user` keeps every user's segments in one split,
    assigning users greedily (largest first) to the split furthest below its target.

    Raises:
        InsufficientSegments: naming the class with fewer than 10 segments, or when a
            by-user split has fewer than 3 users.
    """
    if strategy not in SPLIT_STRATEGIES:
        raise ConfigError(f"split strategy must be one of {SPLIT_STRATEGIES}, got '{strategy}'")

    ratios = check_ratios(ratios)

    if strategy == "by_user":
        assignment = _by_user(segments, ratios, seed)
    else:
        assignment = _segment_stratified(segments, ratios, seed)
        logger.warning(
            "segment-stratified split: overlapping windows of one recording can fall into different splits, "
            "which inflates test accuracy relative to a by-user split"
        )

    assignment.check_disjoint()

    logger.info(
        f"{cl.name(strategy)} split with seed {cl.val(seed)}: "
        f"train {cl.val(len(assignment.train))} val {cl.val(len(assignment.val))} test {cl.val(len(assignment.test))}"
    )

    return assignment
