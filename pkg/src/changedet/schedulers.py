"""Learning-rate schedules as pure epoch -> lr functions.

Epoch-granularity stepping only; milestones are expressed as fractions
of the total epoch count and resolved with ceil. Multistep halves the
rate at 80% and 90% of training, exponential decays by 0.95 per epoch,
cosine anneals without restarts.
"""

import math
from dataclasses import dataclass

from .errors import ConfigError, InvalidArgumentError

SCHEDULER_KINDS = ("none", "multistep", "cosine", "exponential", "linear", "polynomial")


@dataclass
class SchedulerConfig:
    kind: str = "none"
    base_lr: float = 1e-4
    total_epochs: int = 100
    multistep_gamma: float = 0.5
    multistep_milestones: tuple = (0.8, 0.9)
    exp_gamma: float = 0.95
    poly_power: float = 0.9
    min_lr: float = 0.0

    def __post_init__(self):
        if self.kind not in SCHEDULER_KINDS:
            raise ConfigError(
                f"unknown scheduler kind {self.kind!r}; expected one of {SCHEDULER_KINDS}",
                field="scheduler.kind",
            )
        if self.base_lr <= 0:
            raise ConfigError("base_lr must be > 0", field="scheduler.base_lr")
        if self.total_epochs < 1:
            raise ConfigError("total_epochs must be >= 1", field="scheduler.total_epochs")
        if not 0.0 < self.multistep_gamma <= 1.0:
            raise ConfigError(
                "multistep_gamma must be in (0, 1]", field="scheduler.multistep_gamma"
            )
        milestones = tuple(self.multistep_milestones)
        if any(not 0.0 < m < 1.0 for m in milestones) or list(milestones) != sorted(
            set(milestones)
        ):
            raise ConfigError(
                "milestones must be strictly increasing fractions in (0, 1)",
                field="scheduler.multistep_milestones",
            )
        if self.min_lr < 0:
            raise ConfigError("min_lr must be >= 0", field="scheduler.min_lr")


def milestone_epochs(config: SchedulerConfig) -> tuple:
    return tuple(math.ceil(m * config.total_epochs) for m in config.multistep_milestones)


def lr_at(config: SchedulerConfig, epoch: int) -> float:
    """Learning rate for one epoch index in [0, total_epochs)."""
    total = config.total_epochs
    if not 0 <= epoch < total:
        raise InvalidArgumentError(f"epoch {epoch} out of range [0, {total})")
    base = config.base_lr
    kind = config.kind
    if kind == "none":
        return base
    if kind == "multistep":
        passed = sum(1 for m in milestone_epochs(config) if epoch >= m)
        return base * config.multistep_gamma**passed
    if kind == "cosine":
        return config.min_lr + (base - config.min_lr) * (
            1.0 + math.cos(math.pi * epoch / total)
        ) / 2.0
    if kind == "exponential":
        return base * config.exp_gamma**epoch
    if kind == "linear":
        return max(config.min_lr, base * (1.0 - epoch / total))
    if kind == "polynomial":
        return base * (1.0 - epoch / total) ** config.poly_power
    raise ConfigError(f"unknown scheduler kind {kind!r}", field="scheduler.kind")
