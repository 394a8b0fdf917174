"""Segmentation losses on sigmoid probability maps.

All losses consume probabilities (single-logit head followed by
sigmoid), reduce by pixel mean, and share the same clamping epsilon so
focal loss with gamma=0 reduces to plain cross-entropy bit for bit.
"""

from dataclasses import dataclass

import torch

from .errors import ConfigError, ShapeError

EPS = 1e-7

LOSS_KINDS = ("ce", "focal", "dice", "focal+dice", "ce+dice")


@dataclass
class LossConfig:
    kind: str = "ce"
    focal_gamma: float = 2.0
    focal_alpha: float | None = None
    dice_smooth: float = 1.0
    combo_weights: tuple = (1.0, 1.0)

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ConfigError(f"unknown loss kind {self.kind!r}; expected one of {LOSS_KINDS}", field="loss.kind")
        if self.dice_smooth <= 0:
            raise ConfigError("dice_smooth must be > 0", field="loss.dice_smooth")
        w_a, w_b = self.combo_weights
        if w_a < 0 or w_b < 0 or (w_a == 0 and w_b == 0):
            raise ConfigError(
                "combo weights must be >= 0 and not both zero", field="loss.combo_weights"
            )
        if self.focal_gamma < 0:
            raise ConfigError("focal_gamma must be >= 0", field="loss.focal_gamma")
        if self.focal_alpha is not None and not 0.0 < self.focal_alpha < 1.0:
            raise ConfigError("focal_alpha must be in (0, 1)", field="loss.focal_alpha")


def _check_shapes(prob: torch.Tensor, gt: torch.Tensor) -> None:
    if prob.shape != gt.shape:
        raise ShapeError(f"prob {tuple(prob.shape)} vs gt {tuple(gt.shape)}")


def _p_true(prob: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    """Probability assigned to the true class, clamped away from {0, 1}."""
    gt = gt.to(prob.dtype)
    p_t = prob * gt + (1.0 - prob) * (1.0 - gt)
    return p_t.clamp(EPS, 1.0 - EPS)


def ce_loss(prob: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    """Pixel-mean binary cross-entropy."""
    _check_shapes(prob, gt)
    return -torch.log(_p_true(prob, gt)).mean()


def dice_loss(prob: torch.Tensor, gt: torch.Tensor, smooth: float = 1.0) -> torch.Tensor:
    """Soft Dice on the change channel, 1 - (2*sum(p*y)+s)/(sum(p)+sum(y)+s)."""
    _check_shapes(prob, gt)
    gt = gt.to(prob.dtype)
    intersection = (prob * gt).sum()
    denom = prob.sum() + gt.sum() + smooth
    return 1.0 - (2.0 * intersection + smooth) / denom


def focal_loss(
    prob: torch.Tensor,
    gt: torch.Tensor,
    gamma: float = 2.0,
    alpha: float | None = None,
) -> torch.Tensor:
    """Pixel-mean focal loss, -(1 - p_t)^gamma * log(p_t)."""
    _check_shapes(prob, gt)
    p_t = _p_true(prob, gt)
    loss = -((1.0 - p_t) ** gamma) * torch.log(p_t)
    if alpha is not None:
        gt_f = gt.to(prob.dtype)
        weight = alpha * gt_f + (1.0 - alpha) * (1.0 - gt_f)
        loss = weight * loss
    return loss.mean()


def combined_loss(config: LossConfig, prob: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    kind = config.kind
    if kind == "ce":
        return ce_loss(prob, gt)
    if kind == "dice":
        return dice_loss(prob, gt, config.dice_smooth)
    if kind == "focal":
        return focal_loss(prob, gt, config.focal_gamma, config.focal_alpha)
    w_a, w_b = config.combo_weights
    if kind == "ce+dice":
        first = ce_loss(prob, gt)
    elif kind == "focal+dice":
        first = focal_loss(prob, gt, config.focal_gamma, config.focal_alpha)
    else:
        raise ConfigError(f"unknown loss kind {kind!r}", field="loss.kind")
    second = dice_loss(prob, gt, config.dice_smooth)
    return w_a * first + w_b * second
