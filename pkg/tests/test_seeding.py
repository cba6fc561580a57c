import numpy as np
import pytest

from netrank.seeding import derive_seed, make_rng, spawn_seeds


def test_derive_seed_is_stable_and_key_sensitive():
    assert derive_seed(0, "graph", 25) == derive_seed(0, "graph", 25)
    assert derive_seed(0, "graph", 25) != derive_seed(0, "graph", 26)
    assert derive_seed(0, 0.1) != derive_seed(0, 0.1000000001)
    # types are part of the key
    assert derive_seed(1) != derive_seed("1")
    assert 0 <= derive_seed("x") < 2**64


def test_make_rng_purposes_are_independent_streams():
    a = make_rng(7, "init").random(5)
    b = make_rng(7, "noise").random(5)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, make_rng(7, "init").random(5))


def test_make_rng_passes_generators_through():
    g = np.random.default_rng(1)
    assert make_rng(g) is g
    with pytest.raises(TypeError):
        make_rng(g, "init")


def test_spawn_seeds_prefix_consistent():
    long = spawn_seeds(5, 1000, "forest", 3)
    short = spawn_seeds(5, 200, "forest", 3)
    np.testing.assert_array_equal(long[:200], short)
    assert long.dtype == np.uint64
    assert len(set(long.tolist())) == 1000
