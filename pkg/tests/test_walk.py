import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk.walk import (
    Graph,
    arc_basis,
    build_arc_space,
    build_coin,
    build_shift,
    coin_block,
    random_graph,
    simulate_walk,
    vertex_distribution,
    walk_unitary,
)
from qwalk.sim import H_MAT


def cycle(n):
    return Graph(n, tuple((v, (v + 1) % n) for v in range(n)))


def complete_with_loops(n):
    return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)), tuple(range(n)))


def test_arc_counts():
    assert build_arc_space(Graph(2, ((0, 1),))).size == 2
    assert build_arc_space(cycle(8)).size == 16
    assert build_arc_space(complete_with_loops(8)).size == 64


def test_isolated_vertex_rejected():
    with pytest.raises(ValueError, match="isolated"):
        build_arc_space(Graph(3, ((0, 1),)))


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        Graph(2, ((0, 2),))
    with pytest.raises(ValueError):
        Graph(2, ((1, 1),))


def test_graph_json_roundtrip():
    g = Graph(4, ((0, 1), (1, 2), (2, 3)), (0,))
    assert Graph.from_json('{"n": 4, "edges": [[0,1],[1,2],[2,3]], "self_loops": [0]}').to_dict() == g.to_dict()


def test_flip_flop_pair_swap():
    arcs = build_arc_space(Graph(2, ((0, 1),)))
    assert build_shift(arcs).tolist() == [1, 0]


def test_cycle_directed_advances_coin_one():
    g = cycle(8)
    slots = [[(v - 1) % 8, (v + 1) % 8] for v in range(8)]
    arcs = build_arc_space(g, slots)
    perm = build_shift(arcs, "cycle-directed")
    assert perm[arcs.index(3, 1)] == arcs.index(4, 1)
    assert perm[arcs.index(3, 0)] == arcs.index(2, 0)


def test_self_loop_fixed_by_flip_flop():
    arcs = build_arc_space(complete_with_loops(4))
    perm = build_shift(arcs)
    for v in range(4):
        i = arcs.index(v, arcs.slots[v].index(v))
        assert perm[i] == i


def test_custom_pairing_must_follow_edges():
    arcs = build_arc_space(cycle(4))
    with pytest.raises(ValueError, match="off its edge"):
        build_shift(arcs, "custom", lambda v, a: (v, a))


def test_coin_blocks():
    g3 = coin_block("grover", 3).real
    assert np.allclose(np.diag(g3), -1 / 3) and np.allclose(g3[0, 1:], 2 / 3)
    assert np.allclose(coin_block("hadamard", 2), H_MAT)
    assert np.array_equal(coin_block("grover", 2), [[0, 1], [1, 0]])
    assert np.array_equal(coin_block("grover", 1), [[1]])
    with pytest.raises(ValueError):
        coin_block("hadamard", 3)
    with pytest.raises(ValueError):
        coin_block("t", 4)


def test_single_edge_walk_is_swap():
    op = walk_unitary(Graph(2, ((0, 1),)), "grover")
    assert np.array_equal(op.dense(), [[0, 1], [1, 0]])


def test_cycle8_hadamard_one_step():
    slots = [[(v - 1) % 8, (v + 1) % 8] for v in range(8)]
    op = walk_unitary(cycle(8), "hadamard", "cycle-directed", slots)
    dist = simulate_walk(op, arc_basis(op.arcs, 0, 0), 1)
    assert dist[0][0] == 1.0
    expect = np.zeros(8)
    expect[[1, 7]] = 0.5
    assert np.allclose(dist[1], expect, atol=1e-15)


def test_four_cycle_two_steps_conserve():
    for coin in ("grover", "hadamard"):
        op = walk_unitary(cycle(4), coin)
        for d in simulate_walk(op, arc_basis(op.arcs, 2, 1), 2):
            assert abs(d.sum() - 1) <= 1e-12


def test_simulate_rejects_unnormalized():
    op = walk_unitary(cycle(4))
    with pytest.raises(ValueError, match="normalized"):
        simulate_walk(op, 2 * arc_basis(op.arcs, 0, 0), 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_random_graph_invariants(n, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(n, rng)
    op = walk_unitary(g, "grover")
    # flip-flop involution
    assert np.array_equal(op.perm[op.perm], np.arange(op.arcs.size))
    u = op.dense()
    assert np.allclose(u.conj().T @ u, np.eye(op.arcs.size), atol=1e-12)
    # shift moves mass only along edges (or loops)
    av = op.arcs.arc_vertex
    adj = {(a, b) for a, b in g.edges} | {(b, a) for a, b in g.edges}
    for i, j in enumerate(op.perm):
        assert (av[i], av[j]) in adj
    # coin alone keeps per-vertex mass
    psi = rng.normal(size=op.arcs.size) + 1j * rng.normal(size=op.arcs.size)
    psi /= np.linalg.norm(psi)
    before = vertex_distribution(op.arcs, psi)
    after = vertex_distribution(op.arcs, op.C @ psi)
    assert np.max(np.abs(before - after)) <= 1e-12


def test_custom_coin_blocks_checked():
    arcs = build_arc_space(cycle(3))
    with pytest.raises(ValueError, match="not unitary"):
        build_coin(arcs, lambda v: np.ones((2, 2)))
    C = build_coin(arcs, [np.eye(2)] * 3)
    assert np.array_equal(C.toarray(), np.eye(6))


def test_large_cycle_arc_space():
    arcs = build_arc_space(cycle(2**15))
    assert arcs.size == 2**16 and arcs.slots[0] == (1, 2**15 - 1)
