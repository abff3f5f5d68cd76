"""seeding.py - fan a single run seed out into independent named streams.

Every stage asks for its own stream instead of sharing one global RNG, so
adding a random draw in one stage never shifts the numbers another stage sees."""

from __future__ import annotations
from typing import Literal

import numpy as np
import torch

SeedStream = Literal[
    "classifier_init",
    "classifier_split",
    "classifier_shuffle",
    "model_init",
    "training_shuffle",
    "generation",
    "evaluation",
    "gradient_check",
]

# Positions are part of the reproducibility contract: append, never reorder.
_STREAM_INDEX: dict[str, int] = {
    "classifier_init": 0,
    "classifier_split": 1,
    "classifier_shuffle": 2,
    "model_init": 3,
    "training_shuffle": 4,
    "generation": 5,
    "evaluation": 6,
    "gradient_check": 7,
}


def derive_seed(seed: int, stream: SeedStream) -> int:
    """Deterministic 31-bit child seed of `seed` for the named stream."""

    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(_STREAM_INDEX[stream],))
    return int(sequence.generate_state(1, dtype=np.uint32)[0] & 0x7FFFFFFF)


def torch_generator(seed: int, stream: SeedStream) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(derive_seed(seed, stream))
    return generator


def numpy_rng(seed: int, stream: SeedStream) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, stream))


def seed_module_init(seed: int, stream: SeedStream) -> None:
    """Seed torch's global RNG right before building a module, so parameter
    init is a function of the run seed only."""

    torch.manual_seed(derive_seed(seed, stream))


def enable_determinism() -> None:
    """Single-threaded, deterministic kernels. Needed for bit-identical reruns."""

    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True, warn_only=True)
