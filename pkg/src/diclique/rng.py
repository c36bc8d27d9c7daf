"""Deterministic random-number streams.

All randomness in this package derives from a single 64-bit master seed.
Independent sub-streams are addressed by integer paths: the stream at path
``(master, t1, t2, ...)`` is backed by ``PCG64(SeedSequence([master, t1,
t2, ...]))``.  Purpose tags are the module constants below, so the complete
stream layout is documented in one place and call sites that must not share
randomness use different tags.

Within one stream, variates are addressed positionally: PCG64 consumes
exactly one 64-bit word per ``float64`` uniform, and ``advance(k)`` jumps
to word ``k`` in O(log k).  The bipartite sampler relies on this to give
the actor/attribute pair ``(i, k)`` the uniform at word ``i*m + k`` of its
stream, independent of generation order or parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Purpose tags (stable; renumbering one changes every downstream sample).
TAG_NODE_WEIGHTS_X = 1
TAG_NODE_WEIGHTS_Y = 2
TAG_NODE_WEIGHTS_SHARED = 3
TAG_ATTRIBUTE_WEIGHTS = 4
TAG_BIPARTITE = 5
TAG_BIPARTITE_SKIP = 6
TAG_EXPERIMENT = 7
TAG_LIMIT_SAMPLER = 8

MAX_SEED = 2**64 - 1

__all__ = [
    "TAG_NODE_WEIGHTS_X",
    "TAG_NODE_WEIGHTS_Y",
    "TAG_NODE_WEIGHTS_SHARED",
    "TAG_ATTRIBUTE_WEIGHTS",
    "TAG_BIPARTITE",
    "TAG_BIPARTITE_SKIP",
    "TAG_EXPERIMENT",
    "TAG_LIMIT_SAMPLER",
    "MAX_SEED",
    "StreamRoot",
    "positional_uniforms",
]


def _check_path(path: tuple[int, ...]) -> None:
    for part in path:
        if not isinstance(part, (int, np.integer)):
            raise TypeError(f"stream path elements must be integers, got {part!r}")
        if part < 0 or int(part) > MAX_SEED:
            raise ValueError(f"stream path element {part} outside [0, 2**64)")


@dataclass(frozen=True)
class StreamRoot:
    """Handle for a node in the seed-derivation tree.

    A ``StreamRoot`` is cheap to create and immutable; samplers receive one
    and derive their own tagged children, so concurrent callers that hold
    distinct roots never share randomness.
    """

    path: tuple[int, ...]

    def __init__(self, master_seed: int, *path: int):
        full = (int(master_seed),) + tuple(int(p) for p in path)
        _check_path(full)
        object.__setattr__(self, "path", full)

    def child(self, *path: int) -> "StreamRoot":
        return StreamRoot(*self.path, *path)

    def bit_generator(self) -> np.random.PCG64:
        return np.random.PCG64(np.random.SeedSequence(list(self.path)))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(self.bit_generator())


def positional_uniforms(bg: np.random.PCG64, start: int, count: int) -> np.ndarray:
    """Uniforms at word positions ``start .. start+count-1`` of a stream.

    Operates on a copy of ``bg``'s state at its *initial* position, so the
    result depends only on the stream identity and ``start``, never on how
    much the caller has already consumed.
    """
    child = np.random.PCG64(0)
    child.state = bg.state
    if start:
        child.advance(int(start))
    return np.random.Generator(child).random(count)
