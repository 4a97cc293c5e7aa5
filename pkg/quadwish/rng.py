# quadwish/rng.py

"""
Seed plumbing.

An `RngSeed` names a reproducible random stream: the same
``(seed, stream_id, path)`` always yields the same draws. Streams are built
on numpy's counter-based Philox generator, keyed through `SeedSequence`
spawn keys so different stream ids (and substreams) are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Tuple, Union

import numpy as np

from quadwish.errors import InvalidParameterError

_U64 = 2**64


@dataclass(frozen=True)
class RngSeed:
    """
    Reproducible random stream identifier.

    Attributes
    ----------
    seed : int
        User-level seed (unsigned 64-bit).
    stream_id : int
        Stream index (unsigned 64-bit), e.g. the run or task number.
    path : tuple[int, ...]
        Substream indices appended by `substream`.
    """

    seed: int
    stream_id: int = 0
    path: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) < _U64:
                raise InvalidParameterError(f"{name} must fit in an unsigned 64-bit integer")

    def substream(self, index: int) -> "RngSeed":
        """Return an independent child stream."""
        if index < 0:
            raise InvalidParameterError("substream index must be non-negative")
        return replace(self, path=self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        """Build a fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            int(self.seed), spawn_key=(int(self.stream_id), *self.path)
        )
        return np.random.Generator(np.random.Philox(seq))

    def __str__(self) -> str:
        suffix = "".join(f".{p}" for p in self.path)
        return f"{self.seed}:{self.stream_id}{suffix}"


RngLike = Union[RngSeed, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """
    Accept either a seed (fresh stream) or a live generator (continue it).

    Passing an `RngSeed` keeps an operation a pure function of its inputs;
    passing a `Generator` lets callers chain draws from one growing stream.
    """
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSeed):
        return rng.generator()
    raise InvalidParameterError(f"expected RngSeed or numpy Generator, got {type(rng).__name__}")
