"""Stream derivation and positional indexing guarantees."""

import numpy as np
import pytest

from diclique import StreamRoot, positional_uniforms
from diclique.rng import MAX_SEED, TAG_NODE_WEIGHTS_X, TAG_NODE_WEIGHTS_Y


def test_same_path_reproduces():
    a = StreamRoot(123, 4, 5).generator().random(16)
    b = StreamRoot(123, 4, 5).generator().random(16)
    assert np.array_equal(a, b)


def test_distinct_paths_distinct_streams():
    base = StreamRoot(99)
    x = base.child(TAG_NODE_WEIGHTS_X).generator().random(32)
    y = base.child(TAG_NODE_WEIGHTS_Y).generator().random(32)
    assert not np.array_equal(x, y)


def test_distinct_master_seeds_distinct_streams():
    a = StreamRoot(0, 1).generator().random(8)
    b = StreamRoot(1, 1).generator().random(8)
    assert not np.array_equal(a, b)


def test_child_equals_inline_path():
    inline = StreamRoot(7, 2, 3, 4).generator().random(10)
    chained = StreamRoot(7, 2).child(3).child(4).generator().random(10)
    assert np.array_equal(inline, chained)


def test_seed_bounds():
    StreamRoot(MAX_SEED)  # the largest representable master seed is fine
    with pytest.raises(ValueError):
        StreamRoot(-1)
    with pytest.raises(ValueError):
        StreamRoot(MAX_SEED + 1)
    with pytest.raises(ValueError):
        StreamRoot(5, -2)


def test_positional_uniforms_match_sequential_draws():
    reference = StreamRoot(42, 1).generator().random(100)
    bg = StreamRoot(42, 1).bit_generator()
    assert np.array_equal(positional_uniforms(bg, 0, 100), reference)
    assert np.array_equal(positional_uniforms(bg, 37, 22), reference[37:59])
    assert np.array_equal(positional_uniforms(bg, 99, 1), reference[99:100])


def test_positional_uniforms_leave_source_untouched():
    bg = StreamRoot(8, 6).bit_generator()
    first = positional_uniforms(bg, 10, 5)
    again = positional_uniforms(bg, 10, 5)
    assert np.array_equal(first, again)
    # The source still starts from word zero afterwards.
    assert np.array_equal(
        positional_uniforms(bg, 0, 3),
        StreamRoot(8, 6).generator().random(3),
    )


def test_positional_uniforms_blocks_tile_the_stream():
    bg = StreamRoot(3, 9).bit_generator()
    whole = positional_uniforms(bg, 0, 60)
    parts = np.concatenate([
        positional_uniforms(bg, 0, 13),
        positional_uniforms(bg, 13, 17),
        positional_uniforms(bg, 30, 30),
    ])
    assert np.array_equal(whole, parts)
