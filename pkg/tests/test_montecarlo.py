import numpy as np
import pytest

from bellsim.montecarlo import CHUNK_SIZE, chunk_generator, chunk_sizes, map_chunks


def test_chunk_sizes_partition():
    assert chunk_sizes(1) == [1]
    assert chunk_sizes(CHUNK_SIZE) == [CHUNK_SIZE]
    assert chunk_sizes(CHUNK_SIZE + 1) == [CHUNK_SIZE, 1]
    assert chunk_sizes(3 * CHUNK_SIZE + 17) == [CHUNK_SIZE] * 3 + [17]
    with pytest.raises(ValueError):
        chunk_sizes(0)


def test_streams_keyed_by_seed_and_chunk():
    a = chunk_generator(123, 0).random(4)
    b = chunk_generator(123, 0).random(4)
    c = chunk_generator(123, 1).random(4)
    d = chunk_generator(124, 0).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_seed_reduced_modulo_64_bits():
    a = chunk_generator(5, 0).random(4)
    b = chunk_generator((1 << 64) + 5, 0).random(4)
    assert np.array_equal(a, b)


def test_map_chunks_preserves_order():
    sizes = []

    def record(rng, count):
        sizes.append(count)
        return count

    out = map_chunks(2 * CHUNK_SIZE + 5, seed=0, fn=record)
    assert out == [CHUNK_SIZE, CHUNK_SIZE, 5]


def test_map_chunks_worker_invariance():
    def first_draw(rng, count):
        return float(rng.random(count)[0])

    n = 3 * CHUNK_SIZE + 100
    single = map_chunks(n, seed=9, fn=first_draw, workers=1)
    multi = map_chunks(n, seed=9, fn=first_draw, workers=4)
    assert single == multi
