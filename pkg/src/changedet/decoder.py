"""Segmentation decoder: pyramid pooling on the deepest level plus
top-down multi-level feature merging, single-logit output.

The unified channel width defaults to 512, which reproduces the
standard decoder size for this family of models (~31.4M parameters on
a tiny hierarchical encoder). Desk-scale configs shrink it.
"""

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigError

DEFAULT_DECODER_CHANNELS = 512
POOL_SCALES = (1, 2, 3, 6)


def _conv_bn_relu(cin: int, cout: int, kernel: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(cin, cout, kernel, padding=kernel // 2, bias=False),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
    )


class PyramidPooling(nn.Module):
    """Multi-scale context via adaptive average pooling at fixed scales."""

    def __init__(self, in_channels: int, channels: int, scales=POOL_SCALES):
        super().__init__()
        self.stages = nn.ModuleList(
            nn.Sequential(nn.AdaptiveAvgPool2d(scale), _conv_bn_relu(in_channels, channels, 1))
            for scale in scales
        )
        self.bottleneck = _conv_bn_relu(in_channels + len(scales) * channels, channels, 3)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        outs = [x]
        for stage in self.stages:
            pooled = stage(x)
            outs.append(
                F.interpolate(pooled, size=x.shape[-2:], mode="bilinear", align_corners=False)
            )
        return self.bottleneck(torch.cat(outs, dim=1))


class ChangeDecoder(nn.Module):
    """Fused feature pyramid -> single-channel change logits at stride 4."""

    def __init__(self, in_channels, channels: int = DEFAULT_DECODER_CHANNELS):
        super().__init__()
        if len(in_channels) != 4:
            raise ConfigError(f"decoder expects 4 pyramid levels, got {len(in_channels)}")
        self.in_channels = tuple(in_channels)
        self.channels = channels
        self.psp = PyramidPooling(in_channels[-1], channels)
        self.laterals = nn.ModuleList(
            _conv_bn_relu(c, channels, 1) for c in in_channels[:-1]
        )
        self.fpn_convs = nn.ModuleList(
            _conv_bn_relu(channels, channels, 3) for _ in in_channels[:-1]
        )
        self.fusion = _conv_bn_relu(len(in_channels) * channels, channels, 3)
        self.classifier = nn.Conv2d(channels, 1, kernel_size=1)

    def forward(self, features) -> torch.Tensor:
        if len(features) != 4:
            raise ConfigError(f"decoder expects 4 pyramid levels, got {len(features)}")
        for feat, expected in zip(features, self.in_channels):
            if feat.shape[1] != expected:
                raise ConfigError(
                    f"pyramid width {feat.shape[1]} does not match decoder "
                    f"width {expected}"
                )
        laterals = [lat(feat) for lat, feat in zip(self.laterals, features[:-1])]
        laterals.append(self.psp(features[-1]))
        for i in range(len(laterals) - 1, 0, -1):
            laterals[i - 1] = laterals[i - 1] + F.interpolate(
                laterals[i], size=laterals[i - 1].shape[-2:],
                mode="bilinear", align_corners=False,
            )
        outs = [conv(lat) for conv, lat in zip(self.fpn_convs, laterals[:-1])]
        outs.append(laterals[-1])
        top_size = outs[0].shape[-2:]
        outs = [outs[0]] + [
            F.interpolate(o, size=top_size, mode="bilinear", align_corners=False)
            for o in outs[1:]
        ]
        return self.classifier(self.fusion(torch.cat(outs, dim=1)))
