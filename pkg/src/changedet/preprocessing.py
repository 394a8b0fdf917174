"""Normalization and resizing applied to every sample before the model."""

import cv2
import numpy as np

from .datasets import DatasetSpec, ImagePair, Sample
from .errors import CorruptSampleError

IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


def normalize_image(img: np.ndarray) -> np.ndarray:
    return (img - IMAGENET_MEAN) / IMAGENET_STD


def denormalize_image(img: np.ndarray) -> np.ndarray:
    return img * IMAGENET_STD + IMAGENET_MEAN


def resize_image(img: np.ndarray, size: int) -> np.ndarray:
    return cv2.resize(img, (size, size), interpolation=cv2.INTER_LINEAR)


def resize_mask(mask: np.ndarray, size: int) -> np.ndarray:
    return cv2.resize(mask, (size, size), interpolation=cv2.INTER_NEAREST)


def preprocess(sample: Sample, spec: DatasetSpec) -> Sample:
    """Resize (if the dataset requires it) and ImageNet-normalize a sample.

    Images are resized bilinearly, masks with nearest neighbor so they
    stay binary. The sample must arrive at the dataset's declared patch
    size.
    """
    expected = spec.patch_size
    if expected is not None and sample.pair.pre.shape[:2] != (expected, expected):
        raise CorruptSampleError(
            sample.sample_id,
            f"expected {expected}x{expected} input, got {sample.pair.pre.shape[:2]}",
        )
    pre, post, mask = sample.pair.pre, sample.pair.post, sample.gt
    if spec.resize_to is not None and spec.resize_to != pre.shape[0]:
        pre = resize_image(pre, spec.resize_to)
        post = resize_image(post, spec.resize_to)
        mask = resize_mask(mask, spec.resize_to)
    return Sample(
        pair=ImagePair(
            normalize_image(pre).astype(np.float32),
            normalize_image(post).astype(np.float32),
            sample.sample_id,
        ),
        gt=mask.astype(np.uint8),
        split=sample.split,
        normalized=True,
    )
