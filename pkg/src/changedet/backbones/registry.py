"""Encoder registry: every supported (family, size, pretraining) triple.

Feature extraction follows one contract for all families: four levels
at strides 4/8/16/32 relative to the input. Hierarchical families tap
their four stages; the plain ViTs tap four evenly spaced transformer
blocks and reproject to the pyramid strides with parameter-free
interpolation.
"""

from dataclasses import dataclass, field

from ..errors import InvalidSpecError

FAMILIES = ("swin", "swinv2", "vit", "resnet", "convnext")

PRETRAIN_DATASETS = ("IN1k", "EuroSat", "ADE20k", "Cityscapes", "COCO")
PRETRAIN_TASKS = ("classification", "semantic-seg", "panoptic-seg", "instance-seg")


@dataclass(frozen=True)
class Pretrain:
    dataset: str
    task: str

    def __post_init__(self):
        if self.dataset not in PRETRAIN_DATASETS:
            raise InvalidSpecError(
                f"unknown pretrain dataset {self.dataset!r}; known: {PRETRAIN_DATASETS}"
            )
        if self.task not in PRETRAIN_TASKS:
            raise InvalidSpecError(
                f"unknown pretrain task {self.task!r}; known: {PRETRAIN_TASKS}"
            )

    @property
    def token(self) -> str:
        return f"{self.dataset.lower()}-{self.task}"


# the nine pretraining options: random init plus eight (dataset, task) pairs
PRETRAIN_NONE = None
ALL_PRETRAINS = (
    PRETRAIN_NONE,
    Pretrain("IN1k", "classification"),
    Pretrain("EuroSat", "classification"),
    Pretrain("ADE20k", "semantic-seg"),
    Pretrain("Cityscapes", "semantic-seg"),
    Pretrain("Cityscapes", "panoptic-seg"),
    Pretrain("Cityscapes", "instance-seg"),
    Pretrain("COCO", "panoptic-seg"),
    Pretrain("COCO", "instance-seg"),
)

_BASIC = (PRETRAIN_NONE, Pretrain("IN1k", "classification"))

# (family, size) -> (pyramid channel widths, allowed pretrains)
_REGISTRY_ROWS = {
    ("swin", "tiny"): ((96, 192, 384, 768), ALL_PRETRAINS),
    ("swin", "small"): ((96, 192, 384, 768), _BASIC),
    ("swin", "base"): (
        (128, 256, 512, 1024),
        _BASIC + (Pretrain("Cityscapes", "semantic-seg"),),
    ),
    ("swinv2", "tiny"): ((96, 192, 384, 768), _BASIC),
    ("vit", "tiny"): ((192, 192, 192, 192), _BASIC),
    ("vit", "base"): ((768, 768, 768, 768), _BASIC),
    ("resnet", "18"): ((64, 128, 256, 512), _BASIC),
    ("resnet", "50"): ((256, 512, 1024, 2048), _BASIC),
    ("convnext", "base"): ((128, 256, 512, 1024), _BASIC),
}

# tap points: stage indices for hierarchical families, block ids for ViT
_DEFAULT_TAPS = {
    "swin": (0, 1, 2, 3),
    "swinv2": (0, 1, 2, 3),
    "resnet": (0, 1, 2, 3),
    "convnext": (0, 1, 2, 3),
    "vit": (2, 5, 8, 11),
}


@dataclass(frozen=True)
class BackboneSpec:
    family: str
    size: str
    pretrain: Pretrain | None = None
    feature_level_ids: tuple = None

    def __post_init__(self):
        key = (self.family, self.size)
        if key not in _REGISTRY_ROWS:
            raise InvalidSpecError(
                f"unknown backbone {self.family}/{self.size}; "
                f"known: {sorted(_REGISTRY_ROWS)}"
            )
        _, allowed = _REGISTRY_ROWS[key]
        if self.pretrain not in allowed:
            raise InvalidSpecError(
                f"pretrain {pretrain_token(self.pretrain)!r} is not registered for "
                f"{self.family}/{self.size}"
            )
        if self.feature_level_ids is None:
            object.__setattr__(
                self, "feature_level_ids", _DEFAULT_TAPS[self.family]
            )
        elif len(self.feature_level_ids) != 4:
            raise InvalidSpecError("feature_level_ids must have exactly 4 entries")
        else:
            object.__setattr__(self, "feature_level_ids", tuple(self.feature_level_ids))

    @property
    def channels(self) -> tuple:
        return _REGISTRY_ROWS[(self.family, self.size)][0]

    def to_dict(self) -> dict:
        out = {"family": self.family, "size": self.size}
        if self.pretrain is None:
            out["pretrain"] = "none"
        else:
            out["pretrain"] = {"dataset": self.pretrain.dataset, "task": self.pretrain.task}
        if self.feature_level_ids != _DEFAULT_TAPS[self.family]:
            out["feature_level_ids"] = list(self.feature_level_ids)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BackboneSpec":
        pretrain = data.get("pretrain", "none")
        if pretrain in (None, "none"):
            pt = None
        elif isinstance(pretrain, dict):
            pt = Pretrain(pretrain["dataset"], pretrain["task"])
        else:
            pt = _pretrain_from_token(str(pretrain))
        taps = data.get("feature_level_ids")
        return cls(
            family=data["family"],
            size=str(data["size"]),
            pretrain=pt,
            feature_level_ids=tuple(taps) if taps else None,
        )


def pretrain_token(pretrain: Pretrain | None) -> str:
    return "none" if pretrain is None else pretrain.token


def _pretrain_from_token(token: str) -> Pretrain | None:
    if token == "none":
        return None
    lowered = {d.lower(): d for d in PRETRAIN_DATASETS}
    dataset, _, task = token.partition("-")
    if dataset not in lowered or task not in PRETRAIN_TASKS:
        raise InvalidSpecError(f"cannot parse pretrain token {token!r}")
    return Pretrain(lowered[dataset], task)


def backbone_identifier(spec: BackboneSpec) -> str:
    """Stable string key used for manifest rows and cache file names."""
    return f"{spec.family}-{spec.size}-{pretrain_token(spec.pretrain)}"


def parse_backbone_string(text: str) -> BackboneSpec:
    """Parse 'family/size/pretrain-token' as used on the command line."""
    parts = text.split("/")
    if len(parts) == 2:
        family, size = parts
        return BackboneSpec(family, size, None)
    if len(parts) == 3:
        family, size, token = parts
        return BackboneSpec(family, size, _pretrain_from_token(token))
    raise InvalidSpecError(
        f"cannot parse backbone {text!r}; expected family/size[/pretrain]"
    )


def list_backbones() -> list:
    """Every registered spec, one per (family, size, pretrain) triple."""
    specs = []
    for (family, size), (_, allowed) in _REGISTRY_ROWS.items():
        for pretrain in allowed:
            specs.append(BackboneSpec(family, size, pretrain))
    return specs
