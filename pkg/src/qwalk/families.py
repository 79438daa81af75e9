"""One-step walk circuits for each graph family, with the matching graph and encoding.

Every builder returns ``(circuit, graph, encoding)``.  The encoding fixes which
register label holds each arc ``(v, a)`` and which coin/shift conventions the
reference walk operator must use, so ``oracle(graph, encoding)`` rebuilds the
arc-space ``U = S C`` the circuit is meant to implement.

Register layout is always node wires first, then coin wires, most significant
first.  Multi-controlled NOTs are applied directly, so no builder allocates
ancillas; ``circuit.expand_multicontrols`` produces the ancilla form.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .circuit import CircuitBuilder
from .permutations import increment_gates, rotation_gates, rotation_stages, transposition_gates
from .sim import H, M, Register, X, custom, grover, qutrit_t, qutrit_t_matrix, swap
from .walk import Graph, build_arc_space, walk_unitary


@dataclass(frozen=True, eq=False)
class Encoding:
    register: Register
    node_wires: tuple
    coin_wires: tuple
    labels: np.ndarray
    arcs: object
    coin: str
    shift: str
    ancilla_wires: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if len(labels) != self.arcs.size:
            raise ValueError("one label per arc required")
        if len(np.unique(labels)) != len(labels):
            raise ValueError("arc encoding is not injective")
        if labels.min() < 0 or labels.max() >= self.register.dim:
            raise ValueError("arc label outside register")
        for a in self.ancilla_wires:
            if np.any(self.register.wire_digits(a, labels) != 0):
                raise ValueError(f"valid label with nonzero ancilla wire {a}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def num_vertices(self):
        return len(self.arcs.slots)

    @property
    def arc_vertex(self):
        return self.arcs.arc_vertex

    @property
    def valid_mask(self):
        mask = np.zeros(self.register.dim, dtype=bool)
        mask[self.labels] = True
        return mask

    @property
    def num_empty(self):
        return self.register.dim - len(self.labels)

    def label(self, v, a):
        return int(self.labels[self.arcs.index(v, a)])

    def to_dict(self):
        return {
            "register": list(self.register.radices),
            "node_wires": list(self.node_wires),
            "coin_wires": list(self.coin_wires),
            "ancilla_wires": list(self.ancilla_wires),
            "labels": self.labels.tolist(),
            "graph": self.arcs.graph.to_dict(),
            "slots": [list(s) for s in self.arcs.slots],
            "coin": self.coin,
            "shift": self.shift,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        graph = Graph.from_dict(d["graph"])
        arcs = build_arc_space(graph, d["slots"])
        return cls(Register(d["register"]), tuple(d["node_wires"]), tuple(d["coin_wires"]),
                   np.array(d["labels"]), arcs, d["coin"], d["shift"],
                   tuple(d.get("ancilla_wires", ())), dict(d.get("meta", {})))


def oracle(graph, encoding):
    """Arc-space walk operator matching ``encoding``'s subnode order and conventions."""
    return walk_unitary(graph, encoding.coin, encoding.shift, subnode_order=encoding.arcs.slots)


def _ceil_log(n, base=2):
    k = 0
    while base**k < n:
        k += 1
    return k


def _pattern(wires, value):
    """Controls requiring ``wires`` (msb first) to hold ``value``."""
    n = len(wires)
    return tuple((w, (value >> (n - 1 - i)) & 1) for i, w in enumerate(wires))


def _labels(arcs, fn):
    return np.array([fn(v, a) for v, a in arcs.arcs()], dtype=np.int64)


def _swap_cnots(a, b):
    return [X(b, ((a, 1),)), X(a, ((b, 1),)), X(b, ((a, 1),))]


def grover_coin_gates(wires):
    """``G_{2^n}`` on qubit ``wires`` with a single multi-controlled NOT.

    ``G = H^n (2|0><0| - I) H^n``.  Conditioned on the other wires reading 0
    in the Hadamard basis, the last wire must see ``X``; otherwise ``-I``.
    Sandwiching the C^{n-1}NOT between ``M M = Z X`` on each side gives
    exactly that, since ``(ZX) X (ZX) = X`` and ``(ZX)(ZX) = -I``.
    """
    wires = list(wires)
    t, rest = wires[-1], wires[:-1]
    had = [H(w) for w in rest]
    mcx = X(t, tuple((w, 0) for w in rest))
    return had + [M(t), M(t), mcx, M(t), M(t)] + had


def qubit_coin_gates(kind, wires):
    kind = kind.lower()
    wires = list(wires)
    if kind == "hadamard":
        return [H(w) for w in wires]
    if kind == "grover":
        if len(wires) == 1:
            return [grover(wires, 2)]
        return grover_coin_gates(wires)
    if kind == "m":
        if len(wires) != 1:
            raise ValueError("M coin acts on a single coin qubit")
        return [M(wires[0])]
    raise ValueError(f"unknown coin {kind!r}")


# ----------------------------------------------------------------------------
# cycles


def _cycle_graph(N):
    edges = tuple((v, (v + 1) % N) for v in range(N))
    graph = Graph(N, edges, multi=(N == 2))
    slots = [[(v - 1) % N, (v + 1) % N] for v in range(N)]
    return graph, build_arc_space(graph, slots)


def build_cycle_pow2(n, coin="hadamard"):
    """Cycle of ``2^n`` vertices on ``n`` node qubits and one coin qubit.

    Coin 1 increments the node label, coin 0 decrements it.
    """
    if n < 1:
        raise ValueError("cycle exponent must be >= 1")
    return _build_cycle(2**n, coin)


def build_cycle_any(N, coin="hadamard"):
    """Cycle of ``N >= 3`` vertices embedded in ``ceil(log2 N)`` node qubits.

    Labels ``N..2^w-1`` are empty.  Increment is followed by the transposition
    ``(0 N)``, which returns the wrapped label to 0 and swaps an empty label
    back among the empties; decrement is the mirror image.
    """
    if N < 3:
        raise ValueError(f"cycle size must be >= 3, got {N}")
    return _build_cycle(N, coin)


def _build_cycle(N, coin):
    w = max(1, _ceil_log(N))
    node = list(range(w))
    cw = w
    b = CircuitBuilder(Register.qubits(w + 1))
    b.begin("coin")
    b.add(qubit_coin_gates(coin, [cw]))
    b.end()
    b.begin("shift")
    b.add(increment_gates(node, "up", ((cw, 1),)))
    m = 0
    if N != 2**w:
        m = bin(N).count("1")
        b.add(transposition_gates(node, 0, N, ((cw, 1),)))
        b.add(transposition_gates(node, 0, N, ((cw, 0),)))
    b.add(increment_gates(node, "down", ((cw, 0),)))
    b.end()
    predicted = 1 + 2 * w + (2 * (2 * m - 1) if m else 0)
    circuit = b.build(family="cycle", N=N, coin=coin, qubits=w + 1, vertices=N,
                      predicted_gates=predicted,
                      gate_formula="2n+1" if not m else "2w+1+2(2m-1), m=popcount(N)")
    graph, arcs = _cycle_graph(N)
    enc = Encoding(circuit.register, tuple(node), (cw,), _labels(arcs, lambda v, a: 2 * v + a),
                   arcs, coin, "cycle-directed", meta={"empty_node_labels": 2**w - N})
    return circuit, graph, enc


# ----------------------------------------------------------------------------
# tori


def _torus_coin_gates(coin, coin_wires, degree):
    c = len(coin_wires)
    coin = coin.lower()
    if coin == "grover":
        if degree == 2**c:
            return grover_coin_gates(coin_wires)
        return [grover(coin_wires, degree, 2**c)]
    if coin == "hadamard":
        if degree != 2**c:
            raise ValueError(f"Hadamard-product coin needs a power-of-2 degree, got {degree}")
        return [H(w) for w in coin_wires]
    raise ValueError(f"torus coin must be 'grover' or 'hadamard', got {coin!r}")


def _build_torus(exps, twists, coin, family):
    D = len(exps)
    if D < 2:
        raise ValueError("torus needs at least two dimensions")
    if any(k < 1 for k in exps):
        raise ValueError("dimension exponents must be >= 1")
    if any(k == 1 for k in exps):
        raise ValueError("dimension of size 2 would merge the +/- directions; not supported")
    sizes = [2**k for k in exps]
    for i, t in enumerate(twists):
        target = sizes[(i + 1) % D]
        if not 0 <= t < target:
            raise ValueError(f"twist {t} on dimension {i} must be in 0..{target - 1}")
    degree = 2 * D
    c = _ceil_log(degree)
    if c > 3 and degree != 2**c:
        raise ValueError(f"{D} dimensions need a {degree}-dim coin padded beyond 3 wires")
    coords, start = [], 0
    for k in exps:
        coords.append(list(range(start, start + k)))
        start += k
    coin_wires = list(range(start, start + c))
    reg = Register.qubits(start + c)

    b = CircuitBuilder(reg)
    b.begin("coin")
    b.add(_torus_coin_gates(coin, coin_wires, degree))
    b.end()
    b.begin("shift")
    for i in range(D):
        nxt = coords[(i + 1) % D]
        t = twists[i]
        up = _pattern(coin_wires, 2 * i + 1)
        down = _pattern(coin_wires, 2 * i)
        if t:
            b.add(rotation_gates(nxt, t, up + _pattern(coords[i], sizes[i] - 1)))
        b.add(increment_gates(coords[i], "up", up))
        if t:
            b.add(rotation_gates(nxt, sizes[(i + 1) % D] - t, down + _pattern(coords[i], 0)))
        b.add(increment_gates(coords[i], "down", down))
    b.end()

    if coin.lower() == "hadamard":
        predicted = c
    elif degree == 2**c:
        predicted = 2 * c + 3
    else:
        predicted = 1
    predicted += 2 * sum(exps)
    for i, t in enumerate(twists):
        if t:
            kn = exps[(i + 1) % D]
            predicted += sum(kn - (s.bit_length() - 1) for s in rotation_stages(kn, t))
            predicted += sum(kn - (s.bit_length() - 1) for s in rotation_stages(kn, 2**kn - t))

    nverts = math.prod(sizes)

    def coords_of(v):
        out = []
        for s in reversed(sizes):
            out.append(v % s)
            v //= s
        return out[::-1]

    def vertex_of(x):
        v = 0
        for xi, s in zip(x, sizes):
            v = v * s + xi
        return v

    def step(v, i, sign):
        x = coords_of(v)
        j = (i + 1) % D
        if sign > 0:
            if x[i] == sizes[i] - 1:
                x[j] = (x[j] + twists[i]) % sizes[j]
            x[i] = (x[i] + 1) % sizes[i]
        else:
            if x[i] == 0:
                x[j] = (x[j] - twists[i]) % sizes[j]
            x[i] = (x[i] - 1) % sizes[i]
        return vertex_of(x)

    slots = [[step(v, i // 2, +1 if i % 2 else -1) for i in range(degree)] for v in range(nverts)]
    edges = [(v, slots[v][2 * i + 1]) for v in range(nverts) for i in range(D)]
    norm = [tuple(sorted(e)) for e in edges]
    graph = Graph(nverts, tuple(edges), multi=len(set(norm)) != len(norm))
    arcs = build_arc_space(graph, slots)
    circuit = b.build(family=family, dims=list(exps), sizes=sizes, twists=list(twists), coin=coin,
                      qubits=start + c, vertices=nverts, degree=degree,
                      empty_coin_labels=2**c - degree, predicted_gates=predicted,
                      gate_formula="coin + 2*sum(k_i) + twist rotations")
    enc = Encoding(reg, tuple(range(start)), tuple(coin_wires),
                   _labels(arcs, lambda v, a: (v << c) + a), arcs, coin, "cycle-directed",
                   meta={"direction_of_coin": "2i: coordinate i down, 2i+1: coordinate i up"})
    return circuit, graph, enc


def build_torus_grid(dims, coin="grover"):
    """Periodic grid with ``2^{k_i}`` vertices along dimension ``i``.

    Coin label ``2i`` steps coordinate ``i`` down, ``2i+1`` steps it up;
    leftover coin labels are empty.
    """
    return _build_torus(list(dims), [0] * len(dims), coin, "torus")


def build_twisted_torus(sizes=(8, 8, 4), twists=(0, 0, 0), coin="grover"):
    """Torus where wrapping coordinate ``i`` also shifts coordinate ``i+1`` by ``twists[i]``."""
    exps = []
    for s in sizes:
        k = s.bit_length() - 1
        if s < 1 or 2**k != s:
            raise ValueError(f"size {s} is not a power of two")
        exps.append(k)
    if len(twists) != len(sizes):
        raise ValueError("one twist per dimension required")
    return _build_torus(exps, list(twists), coin, "twisted-torus")


# ----------------------------------------------------------------------------
# complete graphs


def build_complete_selfloops(n, coin="hadamard"):
    """Complete graph on ``2^n`` vertices, each with a self-loop.

    Subnode ``a`` of vertex ``v`` points at vertex ``a``, so the flip-flop
    shift is a swap of the node and coin registers (three CNOTs per wire).
    """
    if n < 1:
        raise ValueError("exponent must be >= 1")
    N = 2**n
    node, cw = list(range(n)), list(range(n, 2 * n))
    b = CircuitBuilder(Register.qubits(2 * n))
    b.begin("coin")
    b.add(qubit_coin_gates(coin, cw))
    b.end()
    b.begin("shift")
    for i in range(n):
        b.add(_swap_cnots(node[i], cw[i]))
    b.end()
    if coin == "hadamard":
        predicted = 4 * n
    elif n == 1:
        predicted = 4
    else:
        predicted = 5 * n + 3
    circuit = b.build(family="complete", n=n, coin=coin, qubits=2 * n, vertices=N,
                      predicted_gates=predicted,
                      gate_formula="4n" if coin == "hadamard" else "5n+3")
    edges = tuple((u, v) for u in range(N) for v in range(u + 1, N))
    graph = Graph(N, edges, frozenset(range(N)))
    arcs = build_arc_space(graph)
    enc = Encoding(circuit.register, tuple(node), tuple(cw),
                   _labels(arcs, lambda v, a: v * N + a), arcs, coin, "flip-flop")
    return circuit, graph, enc


def build_complete_bipartite(n):
    """Complete bipartite graph between even and odd labels of ``0..2^n-1``.

    Node register is ``(parity, residue)`` with ``v = 2*residue + parity``;
    subnode ``c`` points at residue ``c`` on the other side.  The shift flips
    the parity wire and swaps residue and coin registers.
    """
    if n < 2:
        raise ValueError("exponent must be >= 2")
    N, half = 2**n, 2 ** (n - 1)
    parity, res, cw = 0, list(range(1, n)), list(range(n, 2 * n - 1))
    b = CircuitBuilder(Register.qubits(2 * n - 1))
    b.begin("coin")
    b.add(H(w) for w in cw)
    b.end()
    b.begin("shift")
    b.add(X(parity))
    for r, c in zip(res, cw):
        b.add(_swap_cnots(r, c))
    b.end()
    circuit = b.build(family="bipartite", n=n, coin="hadamard", qubits=2 * n - 1, vertices=N,
                      predicted_gates=4 * n - 3, gate_formula="4n-3")
    edges = tuple((u, v) for u in range(N) for v in range(u + 1, N) if (u - v) % 2)
    graph = Graph(N, edges)
    arcs = build_arc_space(graph)

    def label(v, a):
        node_label = (v & 1) * half + (v >> 1)
        return node_label * half + a

    enc = Encoding(circuit.register, (parity, *res), tuple(cw), _labels(arcs, label),
                   arcs, "hadamard", "flip-flop")
    return circuit, graph, enc


# ----------------------------------------------------------------------------
# glued trees


def glued_tree_graph(l):
    """Two depth-``l`` binary trees; left leaf ``i`` joins right leaves ``i`` and ``i+1``.

    Vertex ids: left tree ``2^j - 1 + r`` at depth ``j``, row ``r``; right
    tree offset by ``2^{l+1} - 1``.  Subnode order per vertex: children (or
    glue partners) first, parent last.
    """
    if l < 1:
        raise ValueError("depth must be >= 1")
    T = 2 ** (l + 1) - 1
    L = 2**l

    def vid(s, j, r):
        return s * T + 2**j - 1 + r

    slots = [None] * (2 * T)
    edges = []
    for s in (0, 1):
        for j in range(l + 1):
            for r in range(2**j):
                v = vid(s, j, r)
                out = []
                if j < l:
                    out = [vid(s, j + 1, 2 * r), vid(s, j + 1, 2 * r + 1)]
                    edges += [(v, u) for u in out]
                elif s == 0:
                    out = [vid(1, l, r), vid(1, l, (r + 1) % L)]
                    edges += [(v, u) for u in out]
                else:
                    out = [vid(0, l, r), vid(0, l, (r - 1) % L)]
                if j > 0:
                    out.append(vid(s, j - 1, r // 2))
                slots[v] = out
    return Graph(2 * T, tuple(edges)), slots, vid


def build_glued_tree(l):
    """Flip-flop Grover walk on the regularly glued binary trees of depth ``l``.

    Register: side wire, depth register (``ceil(log2(l+1))`` wires), row
    register (``l`` wires), coin wires ``(q1, q0)``.  Coin labels: ``00``/``01``
    child or glue partner, ``10`` parent, ``11`` empty.

    Shift, in order:

    1. parent arcs (``q1 = 1``): depth -1, row bit 0 into ``q0``, row >> 1;
    2. glue arcs (``q1 = 0``, depth ``l``): row +1 on the left / -1 on the
       right when ``q0 = 1``, flip side, then mark with ``q1 = 1``;
    3. child arcs (now exactly the ``q1 = 0`` ones): row << 1, ``q0`` into
       row bit 0, depth +1;
    4. flip ``q1`` everywhere, which finishes all three groups at once.
    """
    if l < 2:
        raise ValueError("depth must be >= 2")
    dw = _ceil_log(l + 1)
    side = 0
    depth = list(range(1, 1 + dw))
    row = list(range(1 + dw, 1 + dw + l))
    q1, q0 = 1 + dw + l, 2 + dw + l
    nwires = 3 + dw + l
    reg = Register.qubits(nwires)
    at_leaf = _pattern(depth, l)
    at_root = _pattern(depth, 0)

    def rotate_left(controls):
        return [swap(row[i], row[i + 1], controls=controls) for i in range(l - 1)]

    b = CircuitBuilder(reg)
    b.begin("coin")
    b.add(grover((q1, q0), 3, 4))
    b.add(grover((q1, q0), 3, 4, controls=at_root))
    b.add(X(q0, at_root))
    b.end()

    b.begin("shift")
    up = ((q1, 1),)
    b.add(increment_gates(depth, "down", up))
    b.add(swap(row[-1], q0, controls=up))
    b.add(rotate_left(up)[::-1])

    glue = ((q1, 0),) + at_leaf
    b.add(increment_gates(row, "up", glue + ((q0, 1), (side, 0))))
    b.add(increment_gates(row, "down", glue + ((q0, 1), (side, 1))))
    b.add(X(side, glue))
    b.add(X(q1, at_leaf))

    down = ((q1, 0),)
    b.add(rotate_left(down))
    b.add(swap(row[-1], q0, controls=down))
    b.add(increment_gates(depth, "up", down))

    b.add(X(q1))
    b.end()

    graph, slots, vid = glued_tree_graph(l)
    arcs = build_arc_space(graph, slots)
    T = 2 ** (l + 1) - 1
    where = {}
    for s in (0, 1):
        for j in range(l + 1):
            for r in range(2**j):
                where[vid(s, j, r)] = (s, j, r)

    def label(v, a):
        s, j, r = where[v]
        return ((((s << dw) + j) << l) + r) * 4 + a

    predicted = 4 * l + 2 * dw + 6
    circuit = b.build(family="glued-tree", depth=l, coin="grover", qubits=nwires,
                      vertices=2 * T, predicted_gates=predicted, gate_formula="4l+2*ceil(log2(l+1))+6",
                      linear_bound=9, qubit_budget=l + math.log2(l) + 5)
    enc = Encoding(reg, (side, *depth, *row), (q1, q0), _labels(arcs, label), arcs,
                   "grover", "flip-flop")
    return circuit, graph, enc


# ----------------------------------------------------------------------------
# qutrits


def qutrit_grover_coin_gates(wires):
    """``G_{3^n} = T_+^n (2|0><0| - I) T_-^n`` with one multi-controlled phase.

    ``2|0><0| - I`` is ``-I`` times a phase flip of ``|0...0>``; the ``-1`` is
    folded into the last wire's ``T_-``.
    """
    wires = list(wires)
    t, rest = wires[-1], wires[:-1]
    phase = np.diag([-1.0, 1.0, 1.0]).astype(complex)
    gates = [qutrit_t(w, -1) for w in rest]
    gates.append(custom(t, -qutrit_t_matrix(-1)))
    gates.append(custom(t, phase, tuple((w, 0) for w in rest)))
    gates += [qutrit_t(w, +1) for w in wires]
    return gates


def build_complete_qutrit(n, coin="t"):
    """Complete graph on ``3^n`` vertices with self-loops, on ``2n`` qutrits."""
    if n < 1:
        raise ValueError("exponent must be >= 1")
    coin = coin.lower()
    N = 3**n
    node, cw = list(range(n)), list(range(n, 2 * n))
    b = CircuitBuilder(Register((3,) * (2 * n)))
    b.begin("coin")
    if coin in ("t", "t+", "t-"):
        sign = -1 if coin == "t-" else +1
        b.add(qutrit_t(w, sign) for w in cw)
        oracle_coin = "t-" if sign < 0 else "t+"
        predicted = 2 * n
    elif coin == "grover":
        b.add(qutrit_grover_coin_gates(cw))
        oracle_coin = "grover"
        predicted = 3 * n + 1
    else:
        raise ValueError(f"qutrit coin must be 't', 't+', 't-' or 'grover', got {coin!r}")
    b.end()
    b.begin("shift")
    b.add(swap(a, c, radix=3) for a, c in zip(node, cw))
    b.end()
    circuit = b.build(family="complete-qutrit", n=n, coin=coin, qutrits=2 * n,
                      vertices=N, predicted_gates=predicted,
                      gate_formula="2n" if oracle_coin != "grover" else "3n+1")
    edges = tuple((u, v) for u in range(N) for v in range(u + 1, N))
    graph = Graph(N, edges, frozenset(range(N)))
    arcs = build_arc_space(graph)
    enc = Encoding(circuit.register, tuple(node), tuple(cw),
                   _labels(arcs, lambda v, a: v * N + a), arcs, oracle_coin, "flip-flop")
    return circuit, graph, enc


# ----------------------------------------------------------------------------
# dispatch


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"family": self.family, **self.params}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(d.pop("family"), d)


def _cycle(p):
    if "exponent" in p:
        return build_cycle_pow2(int(p["exponent"]), p.get("coin", "hadamard"))
    N = int(p["size"])
    if N == 2:
        return build_cycle_pow2(1, p.get("coin", "hadamard"))
    return build_cycle_any(N, p.get("coin", "hadamard"))


BUILDERS = {
    "cycle": _cycle,
    "torus": lambda p: build_torus_grid(p["dims"], p.get("coin", "grover")),
    "twisted-torus": lambda p: build_twisted_torus(p.get("sizes", (8, 8, 4)),
                                                   p.get("twists", (0, 0, 0)),
                                                   p.get("coin", "grover")),
    "complete": lambda p: build_complete_selfloops(int(p["n"]), p.get("coin", "hadamard")),
    "bipartite": lambda p: build_complete_bipartite(int(p["n"])),
    "glued-tree": lambda p: build_glued_tree(int(p["depth"])),
    "complete-qutrit": lambda p: build_complete_qutrit(int(p["n"]), p.get("coin", "t")),
}


def build_family(spec):
    if isinstance(spec, dict):
        spec = FamilySpec.from_dict(spec)
    try:
        builder = BUILDERS[spec.family]
    except KeyError:
        raise ValueError(f"unknown family {spec.family!r}; choose from {sorted(BUILDERS)}") from None
    try:
        return builder(spec.params)
    except KeyError as exc:
        raise ValueError(f"family {spec.family!r} is missing parameter {exc.args[0]!r}") from None
