"""Feature-extraction wrappers around torchvision trunks.

Every encoder maps an RGB image batch to four feature maps at strides
4/8/16/32. Classifier heads are dropped so parameter counts reflect the
encoder alone.
"""

import torch
import torch.nn as nn
import torch.nn.functional as F
import torchvision.models as tvm

from ..errors import InvalidSpecError, ShapeError
from .registry import BackboneSpec

STRIDES = (4, 8, 16, 32)


class FeatureEncoder(nn.Module):
    """Base class: subclasses set out_channels and implement forward
    returning a list of four NCHW feature maps."""

    out_channels: tuple = ()
    strides = STRIDES
    # state-dict key of the first-layer kernel, used as the
    # weight-loading fidelity probe
    probe_key: str = ""
    # key prefixes that pretrained checkpoints are allowed to omit
    # (parts of the wrapper that do not exist in the source trunk)
    pretrain_optional_prefixes: tuple = ()

    def probe_tensor(self) -> torch.Tensor:
        return self.state_dict()[self.probe_key]


_SWIN_BUILDERS = {
    ("swin", "tiny"): tvm.swin_t,
    ("swin", "small"): tvm.swin_s,
    ("swin", "base"): tvm.swin_b,
    ("swinv2", "tiny"): tvm.swin_v2_t,
}


class SwinEncoder(FeatureEncoder):
    """Hierarchical window-attention trunk; stages emit NHWC features."""

    probe_key = "features.0.0.weight"
    pretrain_optional_prefixes = ("norms.",)

    def __init__(self, family: str, size: str, channels: tuple):
        super().__init__()
        self.features = _SWIN_BUILDERS[(family, size)](weights=None).features
        self.out_channels = channels
        # one norm per tapped stage, standard when a classification trunk
        # feeds a dense decoder; absent from upstream checkpoints
        self.norms = nn.ModuleList(nn.LayerNorm(c) for c in channels)
        self._tap_indices = (1, 3, 5, 7)

    def forward(self, x: torch.Tensor) -> list:
        feats = []
        tap = 0
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in self._tap_indices:
                feats.append(self.norms[tap](x).permute(0, 3, 1, 2).contiguous())
                tap += 1
        return feats


class ResNetEncoder(FeatureEncoder):
    probe_key = "stem.0.weight"

    def __init__(self, size: str, channels: tuple):
        super().__init__()
        trunk = {"18": tvm.resnet18, "50": tvm.resnet50}[size](weights=None)
        self.stem = nn.Sequential(trunk.conv1, trunk.bn1, trunk.relu, trunk.maxpool)
        self.layers = nn.ModuleList(
            [trunk.layer1, trunk.layer2, trunk.layer3, trunk.layer4]
        )
        self.out_channels = channels

    def forward(self, x: torch.Tensor) -> list:
        x = self.stem(x)
        feats = []
        for layer in self.layers:
            x = layer(x)
            feats.append(x)
        return feats


class ConvNeXtEncoder(FeatureEncoder):
    probe_key = "features.0.0.weight"

    def __init__(self, channels: tuple):
        super().__init__()
        self.features = tvm.convnext_base(weights=None).features
        self.out_channels = channels
        self._tap_indices = (1, 3, 5, 7)

    def forward(self, x: torch.Tensor) -> list:
        feats = []
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in self._tap_indices:
                feats.append(x)
        return feats


_VIT_DIMS = {
    # hidden dim, mlp dim, heads; all 12 layers, patch 16
    "tiny": (192, 768, 3),
    "base": (768, 3072, 12),
}


class ViTEncoder(FeatureEncoder):
    """Plain ViT with taps at evenly spaced blocks.

    Tapped token grids (stride 16) are reprojected to the pyramid
    strides with bilinear interpolation, which adds no parameters.
    The input spatial size must equal the configured image size.
    """

    probe_key = "vit.conv_proj.weight"

    def __init__(self, size: str, taps: tuple, image_size: int = 256):
        super().__init__()
        hidden, mlp, heads = _VIT_DIMS[size]
        vit = tvm.vision_transformer.VisionTransformer(
            image_size=image_size,
            patch_size=16,
            num_layers=12,
            num_heads=heads,
            hidden_dim=hidden,
            mlp_dim=mlp,
        )
        vit.heads = nn.Identity()
        self.vit = vit
        self.image_size = image_size
        self.taps = tuple(taps)
        self.out_channels = (hidden,) * 4

    def forward(self, x: torch.Tensor) -> list:
        b, _, h, w = x.shape
        if h != self.image_size or w != self.image_size:
            raise ShapeError(
                f"vit encoder configured for {self.image_size}px inputs, got {h}x{w}"
            )
        tokens = self.vit._process_input(x)
        cls = self.vit.class_token.expand(b, -1, -1)
        tokens = torch.cat([cls, tokens], dim=1)
        tokens = tokens + self.vit.encoder.pos_embedding
        tokens = self.vit.encoder.dropout(tokens)
        grid = self.image_size // 16
        taps = []
        for i, block in enumerate(self.vit.encoder.layers):
            tokens = block(tokens)
            if i in self.taps:
                fmap = tokens[:, 1:, :].reshape(b, grid, grid, -1)
                taps.append(fmap.permute(0, 3, 1, 2).contiguous())
        feats = []
        for fmap, stride in zip(taps, STRIDES):
            target = self.image_size // stride
            if target == grid:
                feats.append(fmap)
            else:
                feats.append(
                    F.interpolate(fmap, size=(target, target), mode="bilinear",
                                  align_corners=False)
                )
        return feats


def build_encoder(spec: BackboneSpec, image_size: int = 256) -> FeatureEncoder:
    """Construct the encoder architecture with random initialization."""
    if spec.family in ("swin", "swinv2"):
        if (spec.family, spec.size) not in _SWIN_BUILDERS:
            raise InvalidSpecError(f"no builder for {spec.family}/{spec.size}")
        return SwinEncoder(spec.family, spec.size, spec.channels)
    if spec.family == "resnet":
        return ResNetEncoder(spec.size, spec.channels)
    if spec.family == "convnext":
        return ConvNeXtEncoder(spec.channels)
    if spec.family == "vit":
        return ViTEncoder(spec.size, spec.feature_level_ids, image_size=image_size)
    raise InvalidSpecError(f"no builder for family {spec.family!r}")
