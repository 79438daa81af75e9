"""Discrete-time walk operators built directly on the arc space.

Each vertex ``v`` of degree ``d_v`` owns ``d_v`` subnodes; subnode ``a`` of
``v`` points along one incident edge to ``slots[v][a]``.  The shift is a
permutation of arcs, the coin a block-diagonal unitary with one block per
vertex, and one step is ``U = S @ C``.  Nothing here knows about circuits, so
these matrices serve as the reference every circuit is checked against.
"""

from dataclasses import dataclass, field
import json

import numpy as np
import scipy.sparse as sp

from .sim import H_MAT, M_MAT, grover_matrix, is_unitary, t_product_matrix

NORM_TOL = 1e-10


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices ``0..n-1`` with optional self-loops.

    ``multi=True`` admits repeated edges, which is needed for the 2-cycle.
    """

    n: int
    edges: tuple
    self_loops: frozenset = frozenset()
    multi: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        edges = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"edge ({u}, {v}) is a loop; use self_loops")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            edges.append((min(u, v), max(u, v)))
        if not self.multi and len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        loops = frozenset(int(v) for v in self.self_loops)
        if any(not 0 <= v < self.n for v in loops):
            raise ValueError("self-loop vertex out of range")
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "self_loops", loops)
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for v in loops:
            adj[v].append(v)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(x)) for x in adj))

    def neighbors(self, v):
        """Neighbors of ``v`` in ascending order, repeated for parallel edges; a loop counts once."""
        return list(self._adj[v])

    def degrees(self):
        deg = np.zeros(self.n, dtype=int)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        for v in self.self_loops:
            deg[v] += 1
        return deg

    @property
    def num_edges(self):
        return len(self.edges)

    def to_dict(self):
        return {"n": self.n, "edges": [list(e) for e in self.edges],
                "self_loops": sorted(self.self_loops)}

    @classmethod
    def from_dict(cls, d):
        edges = [tuple(e) for e in d["edges"]]
        multi = len(set(tuple(sorted(e)) for e in edges)) != len(edges)
        return cls(int(d["n"]), tuple(edges), frozenset(d.get("self_loops", ())), multi)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class ArcSpace:
    graph: Graph
    slots: tuple
    offsets: np.ndarray = field(repr=False)

    @property
    def size(self):
        return int(self.offsets[-1])

    def index(self, v, a):
        if not 0 <= a < len(self.slots[v]):
            raise ValueError(f"vertex {v} has no subnode {a}")
        return int(self.offsets[v]) + a

    def arcs(self):
        return [(v, a) for v, s in enumerate(self.slots) for a in range(len(s))]

    @property
    def arc_vertex(self):
        return np.repeat(np.arange(len(self.slots)), np.diff(self.offsets))

    def degree(self, v):
        return len(self.slots[v])


def build_arc_space(graph, subnode_order=None):
    """Enumerate arcs vertex by vertex.

    ``subnode_order`` is ``None`` (ascending neighbor label), a callable
    ``v -> list of neighbors``, or a sequence of per-vertex neighbor lists.
    Whatever the order, it must be a rearrangement of the incident slots.
    """
    slots = []
    for v in range(graph.n):
        natural = graph.neighbors(v)
        if not natural:
            raise ValueError(f"vertex {v} is isolated")
        if subnode_order is None:
            order = natural
        elif callable(subnode_order):
            order = list(subnode_order(v))
        else:
            order = list(subnode_order[v])
        if sorted(order) != natural:
            raise ValueError(f"subnode order at vertex {v} is not a rearrangement of its neighbors")
        slots.append(tuple(int(u) for u in order))
    offsets = np.concatenate([[0], np.cumsum([len(s) for s in slots])]).astype(np.int64)
    return ArcSpace(graph, tuple(slots), offsets)


def build_shift(arcs, mode="flip-flop", pairing=None):
    """Shift as an index array ``perm`` with arc ``i`` moving to arc ``perm[i]``.

    ``flip-flop``: arc ``(v -> u)`` goes to ``(u -> v)``; loops are fixed.
    ``cycle-directed``: arc ``(v, a)`` goes to ``(slots[v][a], a)``; the coin
    label is kept, so on a cycle with slots ``[v-1, v+1]`` coin 1 advances and
    coin 0 retreats.
    ``custom``: ``pairing`` maps ``(v, a)`` to ``(u, b)``.
    """
    size = arcs.size
    perm = np.empty(size, dtype=np.int64)
    if mode == "flip-flop":
        if arcs.graph.multi:
            raise ValueError("flip-flop shift is ambiguous on a multigraph")
        for v, a in arcs.arcs():
            u = arcs.slots[v][a]
            perm[arcs.index(v, a)] = arcs.index(u, arcs.slots[u].index(v))
    elif mode == "cycle-directed":
        for v, a in arcs.arcs():
            u = arcs.slots[v][a]
            if a >= len(arcs.slots[u]):
                raise ValueError(f"cycle-directed shift: vertex {u} has no subnode {a}")
            perm[arcs.index(v, a)] = arcs.index(u, a)
    elif mode == "custom":
        if pairing is None:
            raise ValueError("custom shift needs a pairing")
        for v, a in arcs.arcs():
            u, b = pairing(v, a) if callable(pairing) else pairing[(v, a)]
            if u != arcs.slots[v][a]:
                raise ValueError(f"custom pairing moves ({v}, {a}) off its edge")
            perm[arcs.index(v, a)] = arcs.index(u, b)
    else:
        raise ValueError(f"unknown shift mode {mode!r}")
    if len(np.unique(perm)) != size:
        raise ValueError(f"{mode} shift is not a permutation of the arcs for this graph")
    return perm


def _is_power(d, base):
    while d > 1 and d % base == 0:
        d //= base
    return d == 1


def coin_block(kind, d):
    """Coin block of size ``d`` for a named coin kind."""
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    kind = kind.lower()
    if kind == "grover":
        return grover_matrix(d)
    if kind == "hadamard":
        if not _is_power(d, 2):
            raise ValueError(f"Hadamard-product coin needs a power-of-2 degree, got {d}")
        out = np.ones((1, 1), dtype=complex)
        while out.shape[0] < d:
            out = np.kron(out, H_MAT)
        return out
    if kind == "m":
        if d != 2:
            raise ValueError(f"M coin needs degree 2, got {d}")
        return M_MAT.copy()
    if kind in ("t", "t+", "t-"):
        if not _is_power(d, 3):
            raise ValueError(f"T-product coin needs a power-of-3 degree, got {d}")
        n = round(np.log(d) / np.log(3))
        return t_product_matrix(n, -1 if kind == "t-" else +1)
    raise ValueError(f"unknown coin kind {kind!r}")


def build_coin(arcs, kind="grover"):
    """Block-diagonal coin, one block per vertex.

    ``kind`` is a coin name or a sequence/callable giving each vertex's block.
    """
    blocks = []
    for v in range(len(arcs.slots)):
        d = arcs.degree(v)
        if isinstance(kind, str):
            block = coin_block(kind, d)
        else:
            block = np.asarray(kind(v) if callable(kind) else kind[v], dtype=complex)
        if block.shape != (d, d):
            raise ValueError(f"coin block at vertex {v} has shape {block.shape}, degree is {d}")
        if not is_unitary(block):
            raise ValueError(f"coin block at vertex {v} is not unitary")
        blocks.append(block)
    return sp.block_diag(blocks, format="csr", dtype=complex)


def shift_matrix(perm):
    size = len(perm)
    return sp.csr_matrix((np.ones(size, dtype=complex), (perm, np.arange(size))), shape=(size, size))


@dataclass(frozen=True, eq=False)
class WalkOperator:
    arcs: ArcSpace
    perm: np.ndarray
    C: sp.csr_matrix
    U: sp.csr_matrix

    @property
    def S(self):
        return shift_matrix(self.perm)

    def dense(self):
        return self.U.toarray()


def walk_unitary(graph, coin="grover", shift="flip-flop", subnode_order=None, pairing=None):
    arcs = build_arc_space(graph, subnode_order)
    perm = build_shift(arcs, shift, pairing)
    C = build_coin(arcs, coin)
    U = (shift_matrix(perm) @ C).tocsr()
    return WalkOperator(arcs, perm, C, U)


def vertex_distribution(arcs, amplitudes):
    probs = np.abs(amplitudes) ** 2
    return np.bincount(arcs.arc_vertex, weights=probs, minlength=len(arcs.slots))


def simulate_walk(op, initial, steps):
    """Per-step vertex distributions, from step 0 to ``steps`` inclusive."""
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (op.arcs.size,):
        raise ValueError(f"expected {op.arcs.size} arc amplitudes, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValueError("initial arc amplitudes are not normalized")
    out = [vertex_distribution(op.arcs, psi)]
    for _ in range(steps):
        psi = op.U @ psi
        out.append(vertex_distribution(op.arcs, psi))
    return out


def arc_basis(arcs, v, a):
    psi = np.zeros(arcs.size, dtype=complex)
    psi[arcs.index(v, a)] = 1.0
    return psi


def random_graph(n, rng, p=0.4):
    """Random simple graph on ``n`` vertices with no isolated vertex."""
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    for v in range(n):
        if not any(v in e for e in edges):
            u = int(rng.integers(n - 1))
            u = u if u < v else u + 1
            edges.add((min(u, v), max(u, v)))
    return Graph(n, tuple(sorted(edges)))
