"""Basis-state permutations as cascades of (multi-)controlled NOT gates.

Wires are listed most significant first, so on ``wires = [w0, ..., w_{n-1}]``
the label of a basis state is ``sum(bit(w_i) << (n-1-i))``.  The ``*_gates``
helpers take an explicit wire list plus extra controls so that family
builders can embed them in larger registers; the ``*_circuit`` functions wrap
them on a bare ``n``-qubit register.
"""

import numpy as np

from .circuit import Circuit, circuit_unitary
from .sim import Register, X


def _bit(x, i, n):
    return (x >> (n - 1 - i)) & 1


def increment_gates(wires, direction="up", controls=()):
    """±1 cyclic shift of the label held on ``wires``.

    Flip each wire when every less significant wire is 1 (up) or 0 (down),
    most significant first: ``C^{n-1}NOT, ..., CNOT, NOT``.
    """
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    val = 1 if direction == "up" else 0
    wires = list(wires)
    controls = tuple(controls)
    return [X(w, tuple((c, val) for c in wires[i + 1:]) + controls) for i, w in enumerate(wires)]


def rotation_stages(n, k):
    """Stage sizes (powers of two, largest first) that add up to ``k mod 2^n``."""
    k %= 2**n
    return [1 << m for m in range(n - 1, -1, -1) if (k >> m) & 1]


def rotation_gates(wires, k, controls=()):
    """Add ``k`` modulo ``2^len(wires)``; one increment cascade per set bit of ``k``.

    A stage of size ``2^m`` is an increment of the top ``n - m`` wires.
    """
    wires = list(wires)
    n = len(wires)
    gates = []
    for size in rotation_stages(n, k):
        m = size.bit_length() - 1
        gates += increment_gates(wires[: n - m], "up", controls)
    return gates


def transposition_gates(wires, a, b, controls=(), style="fanout"):
    """Swap labels ``a`` and ``b`` on ``wires``, fixing every other label.

    Both styles use ``2m - 1`` generalized CNOTs where ``m`` is the number of
    wires on which ``a`` and ``b`` differ.

    ``fanout``: CNOTs from the last differing wire ``p`` fold ``b`` onto
    ``a xor e_p``; one fully controlled NOT on ``p`` swaps that pair; the
    CNOTs are undone.  Only the middle gate carries ``n - 1`` controls.

    ``path``: walk a Gray path from ``a`` to ``b`` flipping one differing wire
    at a time, each flip controlled on all other wires, then walk back.
    """
    wires = list(wires)
    n = len(wires)
    if not (0 <= a < 2**n and 0 <= b < 2**n):
        raise ValueError(f"labels {a}, {b} out of range for {n} wires")
    if a == b:
        raise ValueError("transposition needs two distinct labels")
    controls = tuple(controls)
    diff = [i for i in range(n) if _bit(a, i, n) != _bit(b, i, n)]
    if style == "fanout":
        p = diff[-1]
        fold = [X(wires[j], ((wires[p], _bit(b, p, n)),) + controls) for j in diff[:-1]]
        pivot = X(wires[p], tuple((wires[i], _bit(a, i, n)) for i in range(n) if i != p) + controls)
        return fold + [pivot] + fold[::-1]
    if style == "path":
        x = a
        steps = []
        for j in diff:
            ctrl = tuple((wires[i], _bit(x, i, n)) for i in range(n) if i != j)
            steps.append(X(wires[j], ctrl + controls))
            x ^= 1 << (n - 1 - j)
        return steps + steps[-2::-1]
    raise ValueError(f"unknown transposition style {style!r}")


def table_transpositions(table):
    """Transpositions, in application order, whose product is ``x -> table[x]``."""
    table = list(table)
    if sorted(table) != list(range(len(table))):
        raise ValueError("table is not a bijection")
    seen = [False] * len(table)
    out = []
    for start in range(len(table)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        x = table[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = table[x]
        for i in range(len(cyc) - 2, -1, -1):
            out.append((cyc[i], cyc[i + 1]))
    return out


def block_permutation_gates(wires, m, table, controls=(), style="fanout"):
    """Apply ``table`` to the low ``m`` wires, i.e. inside every block of ``2^m`` labels."""
    wires = list(wires)
    if not 0 <= m <= len(wires):
        raise ValueError(f"block exponent {m} outside 0..{len(wires)}")
    if len(table) != 2**m:
        raise ValueError(f"table has {len(table)} entries, expected {2**m}")
    low = wires[len(wires) - m:]
    gates = []
    for a, b in table_transpositions(table):
        gates += transposition_gates(low, a, b, controls, style)
    return gates


def _qubit_circuit(width, gates, **meta):
    if width < 1:
        raise ValueError("need at least one wire")
    return Circuit(Register.qubits(width), tuple(gates), (), meta)


def increment_circuit(n, direction="up"):
    return _qubit_circuit(n, increment_gates(range(n), direction),
                          family="increment", n=n, direction=direction)


def rotation_circuit(n, k):
    if not 0 <= k < 2**n:
        raise ValueError(f"rotation amount {k} outside 0..{2**n - 1}")
    return _qubit_circuit(n, rotation_gates(range(n), k),
                          family="rotation", n=n, k=k, stages=rotation_stages(n, k))


def transposition_circuit(n, a, b, style="fanout"):
    m = bin(a ^ b).count("1")
    return _qubit_circuit(n, transposition_gates(range(n), a, b, style=style),
                          family="transposition", n=n, labels=[a, b], m=m, style=style,
                          predicted_gates=2 * m - 1)


def block_permutation_circuit(n, m, table, style="fanout"):
    return _qubit_circuit(n, block_permutation_gates(range(n), m, table, style=style),
                          family="block", n=n, m=m, table=list(table))


def as_permutation(circuit, atol=1e-12):
    """``perm`` with basis ``j`` mapped to ``perm[j]``; raises unless the unitary is 0/1."""
    u = circuit_unitary(circuit)
    if not np.all((np.abs(u) < atol) | (np.abs(u - 1) < atol)):
        raise ValueError("circuit unitary is not a permutation matrix")
    return np.argmax(np.abs(u), axis=0)
