"""Seed derivation shared by simulators, rankers and the sweep runner.

Every random quantity in the package is drawn from a ``numpy`` generator
built from a :class:`numpy.random.SeedSequence`. Child seeds are derived
from a stable hash of a key tuple, so reordering a sweep grid or changing
the worker count never changes an individual run.
"""
from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "make_rng", "spawn_seeds"]

_MASK64 = (1 << 64) - 1


def _canonical(part) -> str:
    if isinstance(part, float):
        # repr is shortest-round-trip, so 0.1 and 0.1000000001 stay distinct
        return "f" + repr(part)
    if isinstance(part, (bool, np.bool_)):
        return "b" + str(int(part))
    if isinstance(part, (int, np.integer)):
        return "i" + str(int(part))
    return "s" + str(part)


def derive_seed(*key) -> int:
    """Return a 64-bit seed that depends only on the values in *key*."""
    text = "|".join(_canonical(k) for k in key)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & _MASK64


def make_rng(seed, *purpose) -> np.random.Generator:
    """Generator for *seed*, optionally specialised to a named purpose.

    ``make_rng(s, "noise")`` and ``make_rng(s, "init")`` give independent
    streams, so re-seeding one component leaves the others untouched.
    """
    if isinstance(seed, np.random.Generator):
        if purpose:
            raise TypeError("purpose keys require an integer seed")
        return seed
    if purpose:
        seed = derive_seed(int(seed), *purpose)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_seeds(seed: int, count: int, *purpose) -> np.ndarray:
    """*count* independent uint64 seeds for kernels that run their own RNG."""
    base = derive_seed(int(seed), *purpose) if purpose else int(seed)
    ss = np.random.SeedSequence(base)
    return ss.generate_state(count, dtype=np.uint64)
