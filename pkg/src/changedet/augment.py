"""Paired random augmentations.

A fired geometric transform (flips, rotation, crop) is applied with the
same parameters to the pre image, the post image, and the mask, so a
pair never falls out of registration. Photometric transforms (color
jitter, blur) touch the two images with shared parameters and never the
mask. Masks stay strictly binary throughout: nearest-neighbor
resampling everywhere, zero (unchanged) border fill for rotations.
"""

import math
from dataclasses import dataclass, field

import cv2
import numpy as np

from .datasets import ImagePair, Sample
from .errors import InvalidArgumentError
from .preprocessing import IMAGENET_MEAN, IMAGENET_STD


@dataclass
class AugmentationConfig:
    enable_flip: bool = False
    enable_crop: bool = False
    enable_color: bool = False
    enable_blur: bool = False
    probability: float = 0.30
    crop_ratio_range: tuple = (0.3, 1.0)
    rotation_range_deg: tuple = (-90.0, 90.0)
    color_factor_range: tuple = (0.7, 1.3)
    hue_range: tuple = (-0.05, 0.05)
    blur_kernel_choices: tuple = (3, 5, 7, 9)

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidArgumentError(
                f"probability must be in [0, 1], got {self.probability}"
            )
        for name in ("crop_ratio_range", "rotation_range_deg", "color_factor_range", "hue_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidArgumentError(f"{name} is empty: ({lo}, {hi})")
        for k in self.blur_kernel_choices:
            if k < 3 or k % 2 == 0:
                raise InvalidArgumentError(
                    f"blur kernels must be odd and >= 3, got {k}"
                )

    @property
    def any_enabled(self) -> bool:
        return self.enable_flip or self.enable_crop or self.enable_color or self.enable_blur


def sigma_for_kernel(k: int) -> float:
    """Smallest sigma whose derived kernel size round-trips to k.

    The kernel/sigma relation is k == int(sigma * 3.5) * 2 + 1; plain
    division can land one ulp below the integer boundary, so nudge up
    until the relation holds.
    """
    half = (k - 1) // 2
    sigma = half / 3.5
    while int(sigma * 3.5) * 2 + 1 != k:
        sigma = math.nextafter(sigma, math.inf)
    return sigma


def hflip(arr: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(arr[:, ::-1])


def vflip(arr: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(arr[::-1])


def rotate(arr: np.ndarray, angle_deg: float, nearest: bool = False) -> np.ndarray:
    h, w = arr.shape[:2]
    center = ((w - 1) / 2.0, (h - 1) / 2.0)
    matrix = cv2.getRotationMatrix2D(center, angle_deg, 1.0)
    flags = cv2.INTER_NEAREST if nearest else cv2.INTER_LINEAR
    out = cv2.warpAffine(
        arr, matrix, (w, h), flags=flags,
        borderMode=cv2.BORDER_CONSTANT, borderValue=0,
    )
    return out.astype(arr.dtype, copy=False)


def crop_resize(arr: np.ndarray, y0: int, x0: int, side: int, nearest: bool = False) -> np.ndarray:
    h, w = arr.shape[:2]
    window = arr[y0 : y0 + side, x0 : x0 + side]
    interp = cv2.INTER_NEAREST if nearest else cv2.INTER_LINEAR
    out = cv2.resize(window, (w, h), interpolation=interp)
    return out.astype(arr.dtype, copy=False)


def _rgb_grayscale(img: np.ndarray) -> np.ndarray:
    return img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114


def color_jitter(
    img: np.ndarray,
    brightness: float,
    contrast: float,
    saturation: float,
    hue_shift: float,
) -> np.ndarray:
    """Brightness/contrast/saturation scaling plus a hue rotation, on [0, 1] RGB."""
    out = img * brightness
    gray = _rgb_grayscale(out)
    out = (out - gray.mean()) * contrast + gray.mean()
    gray = _rgb_grayscale(out)
    out = out * saturation + gray[..., None] * (1.0 - saturation)
    out = np.clip(out, 0.0, 1.0).astype(np.float32)
    if hue_shift != 0.0:
        hsv = cv2.cvtColor(out, cv2.COLOR_RGB2HSV)
        hsv[..., 0] = (hsv[..., 0] + hue_shift * 360.0) % 360.0
        out = cv2.cvtColor(hsv, cv2.COLOR_HSV2RGB)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def gaussian_blur(img: np.ndarray, kernel: int, sigma: float) -> np.ndarray:
    return cv2.GaussianBlur(img, (kernel, kernel), sigmaX=sigma, sigmaY=sigma)


def _photometric_on_unit_range(images, normalized, op):
    """Run a [0,1]-RGB-space op on images that may be ImageNet-normalized."""
    outs = []
    for img in images:
        if normalized:
            unit = np.clip(img * IMAGENET_STD + IMAGENET_MEAN, 0.0, 1.0).astype(np.float32)
            unit = op(unit)
            outs.append(((unit - IMAGENET_MEAN) / IMAGENET_STD).astype(np.float32))
        else:
            outs.append(op(np.clip(img, 0.0, 1.0).astype(np.float32)))
    return outs


def apply_paired_augmentation(
    sample: Sample,
    config: AugmentationConfig,
    rng: np.random.Generator,
    trace: list | None = None,
) -> Sample:
    """Apply the configured random augmentations to one sample.

    Each enabled transform fires independently with
    ``config.probability``; the flip group draws horizontal flip,
    vertical flip and rotation independently. Fired transforms and
    their parameters are appended to ``trace`` when given, so callers
    can replay them (the test suite replays geometric parameters on a
    coordinate grid).
    """
    if not config.any_enabled or config.probability == 0.0:
        return sample.copy()

    pre = sample.pair.pre.copy()
    post = sample.pair.post.copy()
    mask = sample.gt.copy()
    p = config.probability

    def record(name, **params):
        if trace is not None:
            trace.append((name, params))

    if config.enable_flip:
        if rng.random() < p:
            pre, post, mask = hflip(pre), hflip(post), hflip(mask)
            record("hflip")
        if rng.random() < p:
            pre, post, mask = vflip(pre), vflip(post), vflip(mask)
            record("vflip")
        if rng.random() < p:
            lo, hi = config.rotation_range_deg
            angle = float(rng.uniform(lo, hi))
            pre = rotate(pre, angle)
            post = rotate(post, angle)
            mask = rotate(mask, angle, nearest=True)
            record("rotate", angle=angle)

    if config.enable_crop and rng.random() < p:
        h = pre.shape[0]
        lo, hi = config.crop_ratio_range
        ratio = float(rng.uniform(lo, hi))
        side = max(1, min(h, int(round(ratio * h))))
        y0 = int(rng.integers(0, h - side + 1))
        x0 = int(rng.integers(0, pre.shape[1] - side + 1))
        pre = crop_resize(pre, y0, x0, side)
        post = crop_resize(post, y0, x0, side)
        mask = crop_resize(mask, y0, x0, side, nearest=True)
        record("crop", y0=y0, x0=x0, side=side)

    if config.enable_color and rng.random() < p:
        lo, hi = config.color_factor_range
        brightness = float(rng.uniform(lo, hi))
        contrast = float(rng.uniform(lo, hi))
        saturation = float(rng.uniform(lo, hi))
        hue_shift = float(rng.uniform(*config.hue_range))
        pre, post = _photometric_on_unit_range(
            (pre, post),
            sample.normalized,
            lambda img: color_jitter(img, brightness, contrast, saturation, hue_shift),
        )
        record("color", brightness=brightness, contrast=contrast,
               saturation=saturation, hue_shift=hue_shift)

    if config.enable_blur and rng.random() < p:
        kernel = int(rng.choice(np.asarray(config.blur_kernel_choices)))
        sigma = sigma_for_kernel(kernel)
        pre = gaussian_blur(pre, kernel, sigma)
        post = gaussian_blur(post, kernel, sigma)
        record("blur", kernel=kernel, sigma=sigma)

    mask = (mask > 0).astype(np.uint8)
    return Sample(
        pair=ImagePair(pre, post, sample.sample_id),
        gt=mask,
        split=sample.split,
        normalized=sample.normalized,
    )
