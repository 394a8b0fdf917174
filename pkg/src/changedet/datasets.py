"""Bi-temporal dataset access.

Datasets live on disk in one canonical layout::

    <root>/<split>/A/<id>.png       pre-change image, 8-bit RGB
    <root>/<split>/B/<id>.png       post-change image, 8-bit RGB
    <root>/<split>/label/<id>.png   change mask, 8-bit single channel

Images are decoded to float32 in [0, 1]; labels are binarized with the
>127 rule since the public distributions encode change as 255, 1 or
other nonzero values. The SYNTHETIC dataset is generated in memory when
no root path is given, so desk-scale tests never touch the network or
large downloads.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    CorruptSampleError,
    DatasetNotFoundError,
    InvalidArgumentError,
    InvalidSplitError,
)
from .seeding import derive_rng

SPLITS = ("train", "val", "test")

# name -> (patch size, resize target or None, declared splits,
#          expected per-split sample counts or None)
DATASET_TABLE = {
    "SYSU": (256, None, SPLITS, {"train": 12000, "val": 4000, "test": 4000}),
    "LEVIR": (256, None, SPLITS, {"train": 7120, "val": 1024, "test": 2048}),
    "EGYBCD": (256, None, SPLITS, {"train": 3654, "val": 1219, "test": 1218}),
    "GVLM": (256, None, SPLITS, {"train": 4558, "val": 1519, "test": 1519}),
    "CLCD": (256, None, SPLITS, {"train": 1440, "val": 480, "test": 480}),
    "OSCD": (96, 256, ("train", "test"), {"train": 827, "test": 385}),
    "SYNTHETIC": (None, None, SPLITS, None),
}


@dataclass
class ImagePair:
    """A registered pre/post image pair; both H x W x 3 float32 in [0, 1]
    (or ImageNet-normalized after preprocessing)."""

    pre: np.ndarray
    post: np.ndarray
    sample_id: str

    def __post_init__(self):
        if self.pre.shape != self.post.shape:
            raise CorruptSampleError(
                self.sample_id,
                f"pre/post shapes differ: {self.pre.shape} vs {self.post.shape}",
            )
        if self.pre.ndim != 3 or self.pre.shape[2] != 3:
            raise CorruptSampleError(
                self.sample_id, f"expected HxWx3 images, got {self.pre.shape}"
            )

    @property
    def height(self) -> int:
        return self.pre.shape[0]

    @property
    def width(self) -> int:
        return self.pre.shape[1]


@dataclass
class Sample:
    """One training/evaluation unit: an image pair plus its binary mask."""

    pair: ImagePair
    gt: np.ndarray  # H x W uint8, values in {0, 1}
    split: str = "train"
    normalized: bool = False  # set by preprocess(); drives color aug + display

    def __post_init__(self):
        if self.gt.shape != self.pair.pre.shape[:2]:
            raise CorruptSampleError(
                self.pair.sample_id,
                f"mask shape {self.gt.shape} does not match images "
                f"{self.pair.pre.shape[:2]}",
            )

    @property
    def sample_id(self) -> str:
        return self.pair.sample_id

    def copy(self) -> "Sample":
        return Sample(
            pair=ImagePair(
                self.pair.pre.copy(), self.pair.post.copy(), self.pair.sample_id
            ),
            gt=self.gt.copy(),
            split=self.split,
            normalized=self.normalized,
        )


@dataclass
class DatasetSpec:
    """Identifies a dataset plus its ingestion geometry.

    ``patch_size``/``resize_to`` are pinned per dataset; passing values
    that contradict the table is rejected. The synthetic_* fields are
    only meaningful for name == "SYNTHETIC".
    """

    name: str
    root_path: str | None = None
    patch_size: int | None = None
    resize_to: int | None = None
    synthetic_n: int = 16
    synthetic_change_ratio: float = 0.05
    synthetic_seed: int = 0

    def __post_init__(self):
        if self.name not in DATASET_TABLE:
            raise InvalidArgumentError(
                f"unknown dataset {self.name!r}; known: {sorted(DATASET_TABLE)}"
            )
        table_patch, table_resize, _, _ = DATASET_TABLE[self.name]
        if table_patch is not None:
            if self.patch_size is None:
                self.patch_size = table_patch
            elif self.patch_size != table_patch:
                raise InvalidArgumentError(
                    f"{self.name} patch_size is {table_patch}, got {self.patch_size}"
                )
            if self.resize_to is None:
                self.resize_to = table_resize
            elif self.resize_to != table_resize:
                raise InvalidArgumentError(
                    f"{self.name} resize_to is {table_resize}, got {self.resize_to}"
                )
        else:
            if self.patch_size is None:
                self.patch_size = 256
        if not 0.0 < self.synthetic_change_ratio < 1.0:
            raise InvalidArgumentError(
                f"change ratio must be in (0, 1), got {self.synthetic_change_ratio}"
            )

    @property
    def splits(self) -> tuple:
        return DATASET_TABLE[self.name][2]

    @property
    def expected_counts(self) -> dict | None:
        counts = DATASET_TABLE[self.name][3]
        return dict(counts) if counts else None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _load_image(path: Path, sample_id: str) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return arr.astype(np.float32) / 255.0


def _load_mask(path: Path, sample_id: str) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"), dtype=np.uint8)
    return (arr > 127).astype(np.uint8)


def load_dataset(spec: DatasetSpec, split: str) -> list:
    """Load every sample of a split, sorted lexicographically by id.

    Raises DatasetNotFoundError when the canonical layout is missing,
    InvalidSplitError for splits the dataset does not declare, and
    CorruptSampleError when a sample's files disagree in shape.
    """
    if split not in SPLITS:
        raise InvalidSplitError(f"unknown split {split!r}; expected one of {SPLITS}")
    if split not in spec.splits:
        raise InvalidSplitError(f"dataset {spec.name} has no {split!r} split")

    if spec.name == "SYNTHETIC" and (
        spec.root_path is None or not Path(spec.root_path).exists()
    ):
        return _synthetic_split(spec, split)

    if spec.root_path is None:
        raise DatasetNotFoundError(f"dataset {spec.name} has no root_path configured")
    split_dir = Path(spec.root_path) / split
    dirs = {name: split_dir / name for name in ("A", "B", "label")}
    for name, d in dirs.items():
        if not d.is_dir():
            raise DatasetNotFoundError(f"missing directory {d} (canonical {name}/)")

    ids = sorted(p.stem for p in dirs["A"].iterdir() if p.is_file())
    samples = []
    for sample_id in ids:
        paths = {}
        for name, d in dirs.items():
            matches = sorted(d.glob(sample_id + ".*"))
            if not matches:
                raise CorruptSampleError(sample_id, f"no file under {name}/")
            paths[name] = matches[0]
        pre = _load_image(paths["A"], sample_id)
        post = _load_image(paths["B"], sample_id)
        mask = _load_mask(paths["label"], sample_id)
        if pre.shape != post.shape or mask.shape != pre.shape[:2]:
            raise CorruptSampleError(
                sample_id,
                f"dimension mismatch: A {pre.shape}, B {post.shape}, label {mask.shape}",
            )
        expected = spec.patch_size
        if expected is not None and pre.shape[:2] != (expected, expected):
            raise CorruptSampleError(
                sample_id,
                f"expected {expected}x{expected} patches, got {pre.shape[:2]}",
            )
        samples.append(
            Sample(pair=ImagePair(pre, post, sample_id), gt=mask, split=split)
        )
    return samples


def _synthetic_split(spec: DatasetSpec, split: str) -> list:
    # val/test are smaller and use disjoint seeds so splits never overlap
    split_sizes = {
        "train": spec.synthetic_n,
        "val": max(1, spec.synthetic_n // 4),
        "test": max(1, spec.synthetic_n // 4),
    }
    split_seed_offset = {"train": 0, "val": 1, "test": 2}[split]
    return make_synthetic_dataset(
        n=split_sizes[split],
        change_ratio=spec.synthetic_change_ratio,
        size=spec.patch_size,
        seed=spec.synthetic_seed * 3 + split_seed_offset,
        split=split,
    )


def _smooth_background(rng: np.random.Generator, size: int) -> np.ndarray:
    import cv2

    coarse = rng.uniform(0.15, 0.85, size=(max(2, size // 16), max(2, size // 16), 3))
    img = cv2.resize(coarse.astype(np.float32), (size, size), interpolation=cv2.INTER_LINEAR)
    return np.clip(img, 0.05, 0.95)


def _rasterize_shape(rng: np.random.Generator, size: int, max_frac: float) -> np.ndarray:
    """Boolean region for one rectangle or ellipse, area <= max_frac of the image."""
    area_frac = rng.uniform(0.002, min(0.01, max(0.002, max_frac)))
    area = max(4.0, area_frac * size * size)
    aspect = rng.uniform(0.4, 2.5)
    h = max(2, int(round(np.sqrt(area * aspect))))
    w = max(2, int(round(area / h)))
    h, w = min(h, size), min(w, size)
    y0 = int(rng.integers(0, size - h + 1))
    x0 = int(rng.integers(0, size - w + 1))
    region = np.zeros((size, size), dtype=bool)
    if rng.random() < 0.5:
        region[y0 : y0 + h, x0 : x0 + w] = True
    else:
        yy, xx = np.mgrid[0:size, 0:size]
        cy, cx = y0 + h / 2.0, x0 + w / 2.0
        region = ((yy - cy) / (h / 2.0)) ** 2 + ((xx - cx) / (w / 2.0)) ** 2 <= 1.0
    return region


def make_synthetic_dataset(
    n: int,
    change_ratio: float,
    size: int = 256,
    seed: int = 0,
    split: str = "train",
) -> list:
    """Generate a deterministic desk-scale dataset.

    Each post image is the pre image with geometric shapes shifted in
    color by at least 0.25 per channel, so the mask is exactly the set
    of pixels where pre != post. Per-sample changed fraction lands in
    [change_ratio, change_ratio + 0.01].
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if not 0.0 < change_ratio < 1.0:
        raise InvalidArgumentError(f"change_ratio must be in (0, 1), got {change_ratio}")
    if size < 32:
        raise InvalidArgumentError(f"size must be >= 32, got {size}")

    samples = []
    for idx in range(n):
        rng = derive_rng(seed, "synthetic", idx)
        pre = _smooth_background(rng, size)
        mask = np.zeros((size, size), dtype=bool)
        target = change_ratio
        guard = 0
        while mask.mean() < target and guard < 10_000:
            remaining = target - mask.mean()
            mask |= _rasterize_shape(rng, size, remaining + 0.005)
            guard += 1
        post = pre.copy()
        # shift away from the nearer clip boundary so the recolor never cancels
        delta = rng.uniform(0.25, 0.6, size=3).astype(np.float32)
        shift = np.where(pre > 0.5, -delta, delta)
        post[mask] = np.clip(pre[mask] + shift[mask], 0.0, 1.0)
        sample_id = f"synthetic-{seed:04d}-{idx:05d}"
        samples.append(
            Sample(
                pair=ImagePair(pre.astype(np.float32), post, sample_id),
                gt=mask.astype(np.uint8),
                split=split,
            )
        )
    return samples


def write_canonical(samples, root, split=None) -> int:
    """Materialize samples into the canonical on-disk layout; returns count."""
    root = Path(root)
    written = 0
    for sample in samples:
        target_split = split or sample.split
        for sub in ("A", "B", "label"):
            (root / target_split / sub).mkdir(parents=True, exist_ok=True)
        pre8 = (np.clip(sample.pair.pre, 0, 1) * 255).round().astype(np.uint8)
        post8 = (np.clip(sample.pair.post, 0, 1) * 255).round().astype(np.uint8)
        mask8 = (sample.gt * 255).astype(np.uint8)
        sid = sample.sample_id
        Image.fromarray(pre8).save(root / target_split / "A" / f"{sid}.png")
        Image.fromarray(post8).save(root / target_split / "B" / f"{sid}.png")
        Image.fromarray(mask8).save(root / target_split / "label" / f"{sid}.png")
        written += 1
    return written
