from .registry import (
    BackboneSpec,
    Pretrain,
    backbone_identifier,
    list_backbones,
    parse_backbone_string,
)
from .encoders import FeatureEncoder, build_encoder
from .weights import WeightSource, build_backbone, fetch_weights, load_manifest

__all__ = [
    "BackboneSpec",
    "Pretrain",
    "FeatureEncoder",
    "WeightSource",
    "backbone_identifier",
    "build_backbone",
    "build_encoder",
    "fetch_weights",
    "list_backbones",
    "load_manifest",
    "parse_backbone_string",
]
