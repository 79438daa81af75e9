import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk.circuit import (
    Circuit,
    CircuitBuilder,
    DimensionCapError,
    c2not_cost,
    circuit_from_dict,
    circuit_to_dict,
    circuit_unitary,
    compose,
    dumps,
    expand_multicontrols,
    gate_counts,
    inverse,
    run,
)
from qwalk.families import build_complete_selfloops, build_cycle_pow2, build_glued_tree, oracle
from qwalk.permutations import increment_circuit, rotation_circuit, transposition_circuit
from qwalk.sim import H, Register, StateVector, X, custom, new_basis_state, node_distribution
from qwalk.walk import arc_basis, simulate_walk

from conftest import random_unitary


def _empty(n=1):
    return Circuit(Register.qubits(n))


def test_steps_zero_returns_input():
    c, _, enc = build_cycle_pow2(3)
    s = new_basis_state(c.register, "0110")
    out = run(c, s, 0)
    assert np.array_equal(out.amplitudes, s.amplitudes)
    assert out.amplitudes is not s.amplitudes


def test_run_rejects_mismatch_and_negative_steps():
    c = _empty(2)
    with pytest.raises(ValueError):
        run(c, new_basis_state(Register([2]), "0"))
    with pytest.raises(ValueError):
        run(c, new_basis_state(c.register, "00"), -1)


def test_cycle16_many_steps_matches_oracle():
    c, g, enc = build_cycle_pow2(4)
    op = oracle(g, enc)
    steps = 32
    s = new_basis_state(c.register, c.register.digits(enc.label(0, 0)))
    out = run(c, s, steps)
    expect = simulate_walk(op, arc_basis(op.arcs, 0, 0), steps)[-1]
    got = node_distribution(out, enc)
    assert max(abs(got[v] - expect[v]) for v in range(16)) <= 1e-10


def test_complete16_one_step_uniform():
    c, _, enc = build_complete_selfloops(4, "hadamard")
    s = StateVector(c.register, np.eye(c.register.dim)[enc.label(0, 0)])
    dist = node_distribution(run(c, s), enc)
    assert all(abs(p - 1 / 16) <= 1e-12 for p in dist.values())


def test_unitary_examples():
    assert np.array_equal(circuit_unitary(_empty(2)), np.eye(4))
    assert np.array_equal(circuit_unitary(Circuit(Register.qubits(1), (X(0),))), [[0, 1], [1, 0]])
    u = circuit_unitary(increment_circuit(2))
    # column j is the image of basis j: 00->01->10->11->00
    assert np.argmax(u, axis=0).tolist() == [1, 2, 3, 0]


def test_unitary_cap():
    c = _empty(14)
    with pytest.raises(DimensionCapError):
        circuit_unitary(c)


def test_gate_counts_examples():
    c, _, _ = build_complete_selfloops(4, "hadamard")
    gc = gate_counts(c)
    assert (gc.hadamard, gc.cnot, gc.single, gc.custom, gc.ckn, gc.total) == (4, 12, 4, 0, {}, 16)

    gc = gate_counts(transposition_circuit(4, 0b0000, 0b1001))
    assert gc.generalized_cnot == 3 and gc.total == 3

    gc = gate_counts(_empty())
    assert gc.as_dict() == {"single": 0, "hadamard": 0, "cnot": 0, "ckn": {}, "generalized_cnot": 0,
                            "custom": 0, "total": 0, "c2not_equivalent": 0, "ancillas_needed": 0}


def test_gate_count_classes_sum_to_length():
    c, _, _ = build_glued_tree(3)
    gc = gate_counts(c)
    assert gc.single + gc.cnot + sum(gc.ckn.values()) + gc.custom == gc.total == len(c)


def test_c2not_cost():
    assert [c2not_cost(k) for k in range(6)] == [0, 0, 1, 3, 5, 7]


def test_compose_examples():
    c = rotation_circuit(5, 4)
    assert compose(c, _empty(5)).gates == c.gates
    ident = circuit_unitary(compose(increment_circuit(4, "up"), increment_circuit(4, "down")))
    assert np.allclose(ident, np.eye(16), atol=1e-12)
    r = circuit_unitary(compose(rotation_circuit(5, 4), rotation_circuit(5, 3)))
    assert np.argmax(np.abs(r), axis=0).tolist() == [(j + 7) % 32 for j in range(32)]


def test_compose_rejects_register_mismatch():
    with pytest.raises(ValueError):
        compose(_empty(2), _empty(3))


def test_compose_adds_counts():
    a, _, _ = build_complete_selfloops(3, "grover")
    b = rotation_circuit(6, 45)
    b = Circuit(a.register, b.gates)
    total = gate_counts(a) + gate_counts(b)
    assert total.as_dict() == gate_counts(compose(a, b)).as_dict()


def test_inverse_undoes_circuit(rng):
    reg = Register([2, 3, 2])
    c = Circuit(reg, (custom((0, 1), random_unitary(6, rng)), X(2, ((1, 2),)), H(0)))
    u = circuit_unitary(compose(c, inverse(c)))
    assert np.allclose(u, np.eye(reg.dim), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_run_additivity(a, b, seed):
    rng = np.random.default_rng(seed)
    c, _, enc = build_complete_selfloops(2, "grover")
    amps = rng.normal(size=c.register.dim) + 1j * rng.normal(size=c.register.dim)
    s = StateVector(c.register, amps / np.linalg.norm(amps))
    lhs = run(c, s, a + b).amplitudes
    rhs = run(c, run(c, s, a), b).amplitudes
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


@pytest.mark.parametrize("build", [
    lambda: transposition_circuit(5, 0, 31),
    lambda: build_cycle_pow2(4)[0],
    lambda: build_complete_selfloops(4, "grover")[0],
    lambda: increment_circuit(6),
])
def test_expand_multicontrols_restores_ancillas(build):
    c = build()
    e = expand_multicontrols(c)
    n_anc = len(e.ancillas)
    assert n_anc == gate_counts(c).ancillas_needed > 0
    assert all(g.kind != "X" or g.num_controls <= 2 for g in e.gates)
    assert gate_counts(e).ckn.get(2, 0) >= gate_counts(c).c2not_equivalent
    scale = 2**n_anc
    cols = np.arange(c.register.dim) * scale
    big = circuit_unitary(e)[:, cols]
    small = circuit_unitary(c)
    # every output stays in the ancilla-zero block and agrees with the direct circuit
    assert np.allclose(big[cols, :], small, atol=1e-12)
    assert np.allclose(np.linalg.norm(big[cols, :], axis=0), 1, atol=1e-12)


def test_ancilla_input_must_be_zero():
    e = expand_multicontrols(increment_circuit(4))
    s = new_basis_state(e.register, "0" * (len(e.register) - 1) + "1")
    with pytest.raises(ValueError, match="ancilla"):
        run(e, s)


def test_json_roundtrip_exact():
    b = CircuitBuilder(Register([2, 3]))
    b.begin("body")
    b.add(H(0), custom(1, random_unitary(3, np.random.default_rng(1)), ((0, 1),)))
    b.end()
    c = b.build(family="demo", n=1)
    text = dumps(c)
    d = json.loads(text)
    assert d["schema"] == 1
    back = circuit_from_dict(d)
    assert np.array_equal(circuit_unitary(back), circuit_unitary(c))
    assert back.sections == c.sections and back.meta == c.meta
    assert dumps(back) == text


def test_json_rejects_unknown_schema():
    d = circuit_to_dict(_empty())
    d["schema"] = 99
    with pytest.raises(ValueError, match="schema"):
        circuit_from_dict(d)
