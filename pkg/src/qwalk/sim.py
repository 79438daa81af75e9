"""Dense state vectors over mixed-radix registers and controlled local gates.

Wire 0 is the most significant digit of a basis label.  A gate acts on up to
three target wires, conditioned on any number of ``(wire, digit)`` controls;
a qubit control on digit 0 is the usual open (negative) control.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
import math

import numpy as np

from . import _kernels

ATOL = 1e-12
MAX_SIM_DIM = 2**24
MAX_TARGETS = 3

SQRT2 = math.sqrt(2.0)

X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
M_MAT = np.array([[1, 1], [-1, 1]], dtype=complex) / SQRT2


def grover_matrix(d):
    """Grover coin ``G_d`` with entries ``2/d - delta_ij``."""
    if d < 1:
        raise ValueError("Grover dimension must be >= 1")
    return np.full((d, d), 2.0 / d, dtype=complex) - np.eye(d, dtype=complex)


def qutrit_t_matrix(sign=+1):
    """Single-qutrit Fourier coin, entries ``exp(sign * 2j*pi*a*b/3) / sqrt(3)``."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    a = np.arange(3)
    return np.exp(sign * 2j * np.pi * np.outer(a, a) / 3) / math.sqrt(3)


def t_product_matrix(n, sign=+1):
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, qutrit_t_matrix(sign))
    return out


def shift_matrix(d, power=1):
    """Cyclic shift ``|j> -> |j + power mod d>``."""
    out = np.zeros((d, d), dtype=complex)
    for j in range(d):
        out[(j + power) % d, j] = 1
    return out


def swap_matrix(d):
    out = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            out[b * d + a, a * d + b] = 1
    return out


def is_unitary(mat, atol=ATOL):
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), rtol=0, atol=atol)


@dataclass(frozen=True)
class Register:
    radices: tuple

    def __post_init__(self):
        radices = tuple(int(r) for r in self.radices)
        if not radices:
            raise ValueError("register needs at least one wire")
        if any(r < 2 for r in radices):
            raise ValueError(f"radices must be >= 2, got {radices}")
        object.__setattr__(self, "radices", radices)

    @classmethod
    def qubits(cls, n):
        return cls((2,) * n)

    def __len__(self):
        return len(self.radices)

    @property
    def dim(self):
        return math.prod(self.radices)

    @cached_property
    def strides(self):
        strides = [1] * len(self.radices)
        for w in range(len(self.radices) - 2, -1, -1):
            strides[w] = strides[w + 1] * self.radices[w + 1]
        return tuple(strides)

    def index(self, digits):
        """Basis index of a digit string or digit sequence."""
        if isinstance(digits, str):
            digits = [int(ch, 36) for ch in digits]
        digits = list(digits)
        if len(digits) != len(self.radices):
            raise ValueError(f"label has {len(digits)} digits, register has {len(self.radices)} wires")
        for w, (dig, r) in enumerate(zip(digits, self.radices)):
            if not 0 <= dig < r:
                raise ValueError(f"digit {dig} out of range on wire {w} (radix {r})")
        return sum(d * s for d, s in zip(digits, self.strides))

    def digits(self, index):
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range for dimension {self.dim}")
        out = []
        for s, r in zip(self.strides, self.radices):
            out.append((index // s) % r)
        return tuple(out)

    def wire_digits(self, wire, indices=None):
        """Digit of ``wire`` for each basis index (all indices by default)."""
        if indices is None:
            indices = np.arange(self.dim)
        return (np.asarray(indices) // self.strides[wire]) % self.radices[wire]


@dataclass(frozen=True, eq=False)
class Gate:
    """A controlled local unitary.

    ``matrix`` acts on the tensor product of ``targets`` in list order (first
    target most significant).  ``params`` holds what is needed to rebuild a
    named gate exactly (e.g. ``{"d": 3, "dim": 4}`` for a padded Grover coin).
    """

    kind: str
    targets: tuple
    matrix: np.ndarray
    controls: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        controls = tuple((int(w), int(v)) for w, v in self.controls)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if not targets:
            raise ValueError("gate needs at least one target wire")
        if len(targets) > MAX_TARGETS:
            raise ValueError(f"at most {MAX_TARGETS} target wires, got {len(targets)}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"repeated target wire in {targets}")
        cwires = [w for w, _ in controls]
        if len(set(cwires)) != len(cwires):
            raise ValueError(f"repeated control wire in {cwires}")
        if set(cwires) & set(targets):
            raise ValueError("control and target wires overlap")
        if not is_unitary(mat):
            raise ValueError(f"{self.kind} payload is not unitary")

    @property
    def wires(self):
        return self.targets + tuple(w for w, _ in self.controls)

    @property
    def num_controls(self):
        return len(self.controls)

    def with_controls(self, extra):
        extra = tuple(extra)
        return Gate(self.kind, self.targets, self.matrix, self.controls + extra, self.params)

    def dagger(self):
        return Gate("U", self.targets, self.matrix.conj().T, self.controls)

    def validate(self, register):
        n = len(register)
        for w in self.wires:
            if not 0 <= w < n:
                raise ValueError(f"{self.kind}: wire {w} outside register of {n} wires")
        for w, v in self.controls:
            if not 0 <= v < register.radices[w]:
                raise ValueError(f"{self.kind}: control value {v} invalid on wire {w}")
        tdim = math.prod(register.radices[t] for t in self.targets)
        if self.matrix.shape[0] != tdim:
            raise ValueError(
                f"{self.kind}: payload dimension {self.matrix.shape[0]} != target dimension {tdim}"
            )

    @cached_property
    def perm_source(self):
        """``src`` with ``new[i] = old[src[i]]`` if the payload is a 0/1 permutation, else None."""
        m = self.matrix
        if not np.all((m == 0) | (m == 1)):
            return None
        if not (np.all(m.sum(axis=0) == 1) and np.all(m.sum(axis=1) == 1)):
            return None
        return np.argmax(m.real, axis=1).astype(np.int64)

    def __repr__(self):
        ctrl = "".join(f" c{w}={v}" for w, v in self.controls)
        return f"{self.kind}{list(self.targets)}{ctrl}"


def X(target, controls=()):
    return Gate("X", (target,), X_MAT, controls)


def H(target, controls=()):
    return Gate("H", (target,), H_MAT, controls)


def M(target, controls=()):
    return Gate("M", (target,), M_MAT, controls)


def grover(targets, d, dim=None, controls=()):
    """Grover coin ``G_d`` on ``targets``, padded with identity up to ``dim``."""
    targets = tuple(targets) if not isinstance(targets, int) else (targets,)
    dim = d if dim is None else dim
    if d > dim:
        raise ValueError(f"G_{d} does not fit in a {dim}-dimensional target")
    mat = np.eye(dim, dtype=complex)
    mat[:d, :d] = grover_matrix(d)
    return Gate("G", targets, mat, controls, {"d": d, "dim": dim})


def qutrit_t(target, sign=+1, controls=()):
    return Gate("T", (target,), qutrit_t_matrix(sign), controls, {"sign": sign})


def qutrit_shift(target, power=1, controls=()):
    return Gate("SHIFT", (target,), shift_matrix(3, power), controls, {"power": power % 3})


def swap(a, b, radix=2, controls=()):
    return Gate("SWAP", (a, b), swap_matrix(radix), controls, {"radix": radix})


def custom(targets, matrix, controls=()):
    targets = tuple(targets) if not isinstance(targets, int) else (targets,)
    return Gate("U", targets, matrix, controls)


def gate_from_params(kind, targets, controls, params, matrix=None):
    """Rebuild a gate from its serialised fields."""
    targets = tuple(targets)
    if kind == "X":
        return X(targets[0], controls)
    if kind == "H":
        return H(targets[0], controls)
    if kind == "M":
        return M(targets[0], controls)
    if kind == "G":
        return grover(targets, params["d"], params["dim"], controls)
    if kind == "T":
        return qutrit_t(targets[0], params["sign"], controls)
    if kind == "SHIFT":
        return qutrit_shift(targets[0], params["power"], controls)
    if kind == "SWAP":
        return swap(targets[0], targets[1], params["radix"], controls)
    if kind == "U":
        if matrix is None:
            raise ValueError("custom gate needs an explicit matrix")
        return custom(targets, matrix, controls)
    raise ValueError(f"unknown gate kind {kind!r}")


@lru_cache(maxsize=64)
def _layout(radices, targets, controls):
    reg = Register(radices)
    strides = reg.strides
    offsets = np.zeros(1, dtype=np.int64)
    for t in targets:
        offsets = (offsets[:, None] + np.arange(radices[t], dtype=np.int64)[None, :] * strides[t]).ravel()
    base0 = sum(v * strides[w] for w, v in controls)
    bases = np.array([base0], dtype=np.int64)
    fixed = set(targets) | {w for w, _ in controls}
    for w in range(len(radices)):
        if w in fixed:
            continue
        bases = (bases[:, None] + np.arange(radices[w], dtype=np.int64)[None, :] * strides[w]).ravel()
    bases.sort()
    bases.setflags(write=False)
    offsets.setflags(write=False)
    return bases, offsets


def apply_inplace(amps, register, gate, backend=None):
    """Apply ``gate`` to a ``(dim, batch)`` amplitude array in place."""
    bases, offsets = _layout(register.radices, gate.targets, gate.controls)
    src = gate.perm_source
    if src is not None:
        _kernels.apply_perm(amps, bases, offsets, src, backend)
    else:
        _kernels.apply_dense(amps, bases, offsets, np.ascontiguousarray(gate.matrix), backend)


@dataclass(eq=False)
class StateVector:
    register: Register
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.register.dim,):
            raise ValueError(f"expected {self.register.dim} amplitudes, got shape {amps.shape}")
        self.amplitudes = amps

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def copy(self):
        return StateVector(self.register, self.amplitudes.copy())


def new_basis_state(register, label):
    if register.dim > MAX_SIM_DIM:
        raise ValueError(f"register dimension {register.dim} exceeds simulation cap {MAX_SIM_DIM}")
    amps = np.zeros(register.dim, dtype=complex)
    amps[register.index(label)] = 1.0
    return StateVector(register, amps)


def apply_gate(state, gate, backend=None):
    gate.validate(state.register)
    amps = state.amplitudes.copy().reshape(-1, 1)
    apply_inplace(amps, state.register, gate, backend)
    return StateVector(state.register, amps.ravel())


def node_distribution(state, encoding):
    """Probability per vertex, summed over that vertex's encoded subnodes."""
    if tuple(state.register.radices) != tuple(encoding.register.radices):
        raise ValueError("state register does not match encoding register")
    probs = state.probabilities()[encoding.labels]
    per_vertex = np.bincount(encoding.arc_vertex, weights=probs, minlength=encoding.num_vertices)
    return {v: float(p) for v, p in enumerate(per_vertex)}
