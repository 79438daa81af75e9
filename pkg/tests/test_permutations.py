import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk.circuit import circuit_unitary, compose, gate_counts
from qwalk.permutations import (
    as_permutation,
    block_permutation_circuit,
    increment_circuit,
    rotation_circuit,
    rotation_stages,
    table_transpositions,
    transposition_circuit,
)


# index-arithmetic oracles: image of every label
def rotation_oracle(n, k):
    return (np.arange(2**n) + k) % 2**n


def transposition_oracle(n, a, b):
    out = np.arange(2**n)
    out[a], out[b] = b, a
    return out


def block_oracle(n, m, table):
    x = np.arange(2**n)
    return (x >> m << m) | np.asarray(table)[x & (2**m - 1)]


def assert_realizes(circuit, expected):
    u = circuit_unitary(circuit)
    assert np.all((np.abs(u) < 1e-12) | (np.abs(u - 1) < 1e-12))
    assert np.array_equal(as_permutation(circuit), expected)


@pytest.mark.parametrize("n", range(1, 9))
def test_increment_exhaustive(n):
    assert_realizes(increment_circuit(n, "up"), rotation_oracle(n, 1))
    assert_realizes(increment_circuit(n, "down"), rotation_oracle(n, -1))


def test_increment_small_examples():
    assert as_permutation(increment_circuit(2)).tolist() == [1, 2, 3, 0]
    c = increment_circuit(1)
    assert len(c) == 1 and c.gates[0].kind == "X" and not c.gates[0].controls
    u = circuit_unitary(compose(increment_circuit(3, "up"), increment_circuit(3, "down")))
    assert np.array_equal(u, np.eye(8))


@pytest.mark.parametrize("n", range(1, 9))
def test_rotation_exhaustive(n, rng):
    ks = range(2**n) if n <= 5 else sorted({0, 1, 2**n - 1, *rng.integers(0, 2**n, 12).tolist()})
    for k in ks:
        c = rotation_circuit(n, k)
        assert_realizes(c, rotation_oracle(n, k))
        assert len(c.meta["stages"]) == bin(k).count("1")


def test_rotation_examples():
    c = rotation_circuit(5, 7)
    assert c.meta["stages"] == [4, 2, 1]
    assert rotation_stages(5, 7) == [4, 2, 1]
    assert len(rotation_circuit(5, 0)) == 0
    for k in range(1, 32):
        u = circuit_unitary(compose(rotation_circuit(5, k), rotation_circuit(5, 32 - k)))
        assert np.array_equal(u, np.eye(32))


def test_rotation_range_checked():
    with pytest.raises(ValueError):
        rotation_circuit(3, 8)


@pytest.mark.parametrize("style", ["fanout", "path"])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_transposition_all_pairs(n, style):
    for a, b in itertools.combinations(range(2**n), 2):
        c = transposition_circuit(n, a, b, style)
        assert_realizes(c, transposition_oracle(n, a, b))
        m = bin(a ^ b).count("1")
        gc = gate_counts(c)
        assert gc.total == 2 * m - 1
        # on one wire the lone gate is a bare NOT
        assert gc.generalized_cnot == (gc.total if n > 1 else 0)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_transposition_sampled_pairs(n, rng):
    pairs = [(0, 2**n - 1)] + [tuple(rng.choice(2**n, 2, replace=False)) for _ in range(8)]
    for a, b in pairs:
        assert_realizes(transposition_circuit(n, int(a), int(b)), transposition_oracle(n, a, b))


def test_transposition_examples():
    c = transposition_circuit(4, 0b0000, 0b1001)
    assert gate_counts(c).generalized_cnot == 3
    c = transposition_circuit(4, 0b0110, 0b0111)
    assert len(c) == 1 and c.gates[0].num_controls == 3
    twice = compose(c, c)
    assert np.array_equal(circuit_unitary(twice), np.eye(16))
    with pytest.raises(ValueError):
        transposition_circuit(3, 5, 5)


@pytest.mark.parametrize("n", range(3, 9))
def test_transposition_c2not_bound(n):
    gc = gate_counts(transposition_circuit(n, 0, 2**n - 1))
    assert gc.generalized_cnot == 2 * n - 1
    assert gc.c2not_equivalent <= 2 * n * n - 3 * n


def test_block_examples():
    c = block_permutation_circuit(3, 1, [1, 0])
    assert len(c) == 1 and c.gates[0].targets == (2,) and not c.gates[0].controls
    assert_realizes(c, block_oracle(3, 1, [1, 0]))
    assert len(block_permutation_circuit(4, 2, [0, 1, 2, 3])) == 0
    cyc = [1, 2, 3, 0]
    c = block_permutation_circuit(4, 2, cyc)
    assert_realizes(c, block_oracle(4, 2, cyc))
    assert all(w in (2, 3) for g in c.gates for w in g.wires)


def test_block_rejects_non_bijection():
    with pytest.raises(ValueError, match="bijection"):
        block_permutation_circuit(3, 1, [0, 0])
    with pytest.raises(ValueError):
        block_permutation_circuit(3, 2, [0, 1])


@pytest.mark.parametrize("n", range(1, 9))
def test_block_exhaustive(n, rng):
    for m in range(0, min(n, 3) + 1):
        for _ in range(3):
            table = rng.permutation(2**m).tolist()
            assert_realizes(block_permutation_circuit(n, m, table), block_oracle(n, m, table))


def test_table_transpositions_compose_to_table():
    rng = np.random.default_rng(3)
    for _ in range(20):
        table = rng.permutation(16).tolist()
        x = np.arange(16)
        for a, b in table_transpositions(table):
            x = np.where(x == a, b, np.where(x == b, a, x))
        assert x.tolist() == table


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1)).filter(lambda t: t[1] != t[2])))
def test_transposition_property(case):
    n, a, b = case
    for style in ("fanout", "path"):
        c = transposition_circuit(n, a, b, style)
        assert np.array_equal(as_permutation(c), transposition_oracle(n, a, b))
