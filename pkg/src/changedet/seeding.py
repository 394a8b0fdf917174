"""Deterministic random-stream derivation.

Every stochastic component derives its generator from (global seed,
context keys) so that parallel data workers and sequential execution
produce identical streams. String keys are hashed with crc32, which is
stable across processes and interpreter versions (unlike ``hash``).
"""

import random
import zlib

import numpy as np
import torch


def derive_rng(*keys) -> np.random.Generator:
    """Return a numpy Generator seeded from a tuple of ints and strings."""
    entropy = []
    for key in keys:
        if isinstance(key, str):
            entropy.append(zlib.crc32(key.encode("utf-8")))
        elif isinstance(key, (int, np.integer)):
            entropy.append(int(key) & 0xFFFFFFFF)
        else:
            raise TypeError(f"unsupported rng key type: {type(key)!r}")
    return np.random.default_rng(np.random.SeedSequence(entropy))


def seed_everything(seed: int, deterministic: bool = True) -> None:
    """Seed python, numpy and torch global streams for one training run."""
    random.seed(seed)
    np.random.seed(seed & 0xFFFFFFFF)
    torch.manual_seed(seed)
    if torch.cuda.is_available():
        torch.cuda.manual_seed_all(seed)
        if deterministic:
            torch.backends.cudnn.deterministic = True
            torch.backends.cudnn.benchmark = False
