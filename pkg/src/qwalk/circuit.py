"""Circuit container: execution, unitary extraction, gate accounting, JSON."""

from collections import Counter
from dataclasses import dataclass, field
import json

import numpy as np

from .sim import (
    MAX_SIM_DIM,
    Gate,
    Register,
    StateVector,
    X,
    apply_inplace,
    gate_from_params,
)

MAX_UNITARY_DIM = 2**13
SCHEMA_VERSION = 1


class DimensionCapError(ValueError):
    """Raised when a dense object would exceed the desk-scale size cap."""


@dataclass(frozen=True, eq=False)
class Circuit:
    register: Register
    gates: tuple = ()
    ancillas: tuple = ()
    meta: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancillas", tuple(sorted(int(a) for a in self.ancillas)))
        for g in self.gates:
            g.validate(self.register)
        for a in self.ancillas:
            if not 0 <= a < len(self.register):
                raise ValueError(f"ancilla wire {a} outside register")
        for name, (lo, hi) in self.sections.items():
            if not 0 <= lo <= hi <= len(self.gates):
                raise ValueError(f"section {name!r} range ({lo}, {hi}) out of bounds")

    def __len__(self):
        return len(self.gates)

    @property
    def num_wires(self):
        return len(self.register)

    @property
    def data_wires(self):
        """Number of non-ancilla wires."""
        return len(self.register) - len(self.ancillas)

    def section(self, name):
        lo, hi = self.sections[name]
        return self.gates[lo:hi]


class CircuitBuilder:
    """Mutable gate accumulator with named sections."""

    def __init__(self, register, ancillas=()):
        self.register = register if isinstance(register, Register) else Register(register)
        self.ancillas = tuple(ancillas)
        self.gates = []
        self.sections = {}
        self._open = None

    def add(self, *gates):
        for g in gates:
            if isinstance(g, Gate):
                self.gates.append(g)
            else:
                self.gates.extend(g)
        return self

    def begin(self, name):
        self._open = (name, len(self.gates))

    def end(self):
        name, lo = self._open
        self.sections[name] = (lo, len(self.gates))
        self._open = None

    def build(self, **meta):
        return Circuit(self.register, tuple(self.gates), self.ancillas, meta, dict(self.sections))


def _check_ancillas(circuit, amps):
    if not circuit.ancillas:
        return
    idx = np.nonzero(np.abs(amps) > 0)[0]
    for a in circuit.ancillas:
        if np.any(circuit.register.wire_digits(a, idx) != 0):
            raise ValueError(f"ancilla wire {a} is not in state 0 on input")


def _run_array(circuit, amps, steps, backend=None):
    for _ in range(steps):
        for g in circuit.gates:
            apply_inplace(amps, circuit.register, g, backend)
    return amps


def run(circuit, state, steps=1, backend=None):
    """Apply the circuit ``steps`` times to a copy of ``state``."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if tuple(state.register.radices) != tuple(circuit.register.radices):
        raise ValueError("state register does not match circuit register")
    if circuit.register.dim > MAX_SIM_DIM:
        raise DimensionCapError(f"dimension {circuit.register.dim} exceeds {MAX_SIM_DIM}")
    _check_ancillas(circuit, state.amplitudes)
    amps = state.amplitudes.copy().reshape(-1, 1)
    _run_array(circuit, amps, steps, backend)
    return StateVector(state.register, amps.ravel())


def circuit_columns(circuit, inputs, backend=None):
    """Columns of the circuit unitary at the given basis indices, shape ``(dim, len(inputs))``."""
    inputs = np.asarray(inputs, dtype=np.int64)
    amps = np.zeros((circuit.register.dim, len(inputs)), dtype=complex)
    amps[inputs, np.arange(len(inputs))] = 1.0
    return _run_array(circuit, amps, 1, backend)


def circuit_unitary(circuit, backend=None):
    dim = circuit.register.dim
    if dim > MAX_UNITARY_DIM:
        raise DimensionCapError(f"dimension {dim} exceeds unitary cap {MAX_UNITARY_DIM}")
    return circuit_columns(circuit, np.arange(dim), backend)


def compose(a, b):
    """``a`` followed by ``b``."""
    if tuple(a.register.radices) != tuple(b.register.radices):
        raise ValueError("cannot compose circuits on different registers")
    if a.ancillas != b.ancillas:
        raise ValueError("cannot compose circuits with different ancilla sets")
    shift = len(a.gates)
    sections = dict(a.sections)
    for name, (lo, hi) in b.sections.items():
        key = name if name not in sections else f"{name}.2"
        sections[key] = (lo + shift, hi + shift)
    meta = {"composed": [a.meta.get("family", "?"), b.meta.get("family", "?")]}
    return Circuit(a.register, a.gates + b.gates, a.ancillas, meta, sections)


def inverse(circuit):
    """Reverse the gate list; self-inverse gates are kept by name."""
    gates = []
    for g in reversed(circuit.gates):
        m = g.matrix
        gates.append(g if np.array_equal(m.conj().T, m) else g.dagger())
    return Circuit(circuit.register, tuple(gates), circuit.ancillas,
                   {"inverse_of": circuit.meta.get("family")})


# ----------------------------------------------------------------------------
# accounting


def c2not_cost(k):
    """C²NOT gates for one C^kNOT under the clean-ancilla V-chain (k-2 ancillas)."""
    return 2 * k - 3 if k >= 2 else 0


@dataclass
class GateCounts:
    single: int = 0
    hadamard: int = 0
    cnot: int = 0
    ckn: dict = field(default_factory=dict)
    custom: int = 0
    total: int = 0
    c2not_equivalent: int = 0
    ancillas_needed: int = 0

    @property
    def generalized_cnot(self):
        """Controlled-X gates with at least one control."""
        return self.cnot + sum(self.ckn.values())

    def __add__(self, other):
        ckn = Counter(self.ckn)
        ckn.update(other.ckn)
        return GateCounts(
            self.single + other.single,
            self.hadamard + other.hadamard,
            self.cnot + other.cnot,
            dict(sorted(ckn.items())),
            self.custom + other.custom,
            self.total + other.total,
            self.c2not_equivalent + other.c2not_equivalent,
            max(self.ancillas_needed, other.ancillas_needed),
        )

    def as_dict(self):
        return {
            "single": self.single,
            "hadamard": self.hadamard,
            "cnot": self.cnot,
            "ckn": {str(k): v for k, v in self.ckn.items()},
            "generalized_cnot": self.generalized_cnot,
            "custom": self.custom,
            "total": self.total,
            "c2not_equivalent": self.c2not_equivalent,
            "ancillas_needed": self.ancillas_needed,
        }


def gate_class(g):
    """One of ``single``, ``cnot``, ``ckn`` or ``custom``."""
    k = g.num_controls
    if k == 0 and len(g.targets) == 1:
        return "single"
    if g.kind == "X" and k == 1:
        return "cnot"
    if g.kind == "X" and k >= 2:
        return "ckn"
    return "custom"


def gate_counts(circuit_or_gates):
    gates = circuit_or_gates.gates if isinstance(circuit_or_gates, Circuit) else tuple(circuit_or_gates)
    out = GateCounts()
    ckn = Counter()
    for g in gates:
        cls = gate_class(g)
        if cls == "single":
            out.single += 1
            if g.kind == "H":
                out.hadamard += 1
        elif cls == "cnot":
            out.cnot += 1
        elif cls == "ckn":
            k = g.num_controls
            ckn[k] += 1
            out.c2not_equivalent += c2not_cost(k)
            out.ancillas_needed = max(out.ancillas_needed, k - 2)
        else:
            out.custom += 1
    out.ckn = dict(sorted(ckn.items()))
    out.total = len(gates)
    return out


def expand_multicontrols(circuit):
    """Rewrite every C^kNOT (k >= 3) as a C²NOT V-chain on fresh clean ancillas.

    Open controls are conjugated with X.  The ancillas are appended to the
    register and recorded in ``Circuit.ancillas``; the result agrees with the
    input on the ancilla-zero subspace and returns ancillas to zero.
    """
    counts = gate_counts(circuit)
    n_anc = max(0, max((g.num_controls for g in circuit.gates if g.kind == "X"), default=0) - 2)
    n = len(circuit.register)
    if n_anc == 0:
        return circuit
    if any(r != 2 for r in circuit.register.radices):
        raise ValueError("multi-control expansion only supports qubit registers")
    reg = Register(circuit.register.radices + (2,) * n_anc)
    anc = list(range(n, n + n_anc))
    gates = []
    for g in circuit.gates:
        k = g.num_controls
        if g.kind != "X" or k < 3:
            gates.append(g)
            continue
        flips = [X(w) for w, v in g.controls if v == 0]
        c = [w for w, _ in g.controls]
        chain = [X(anc[0], ((c[0], 1), (c[1], 1)))]
        for i in range(2, k - 1):
            chain.append(X(anc[i - 1], ((c[i], 1), (anc[i - 2], 1))))
        core = X(g.targets[0], ((c[k - 1], 1), (anc[k - 3], 1)))
        gates += flips + chain + [core] + chain[::-1] + flips
    ancillas = tuple(circuit.ancillas) + tuple(anc)
    meta = dict(circuit.meta, expanded_from=counts.as_dict(), ancilla_budget=n_anc)
    return Circuit(reg, gates, ancillas, meta)


# ----------------------------------------------------------------------------
# serialisation


def _matrix_to_json(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def gate_to_dict(g):
    out = {"kind": g.kind, "targets": list(g.targets), "controls": [list(c) for c in g.controls]}
    if g.params:
        out["params"] = dict(g.params)
    if g.kind == "U":
        out["matrix"] = _matrix_to_json(g.matrix)
    return out


def gate_from_dict(d):
    matrix = _matrix_from_json(d["matrix"]) if "matrix" in d else None
    return gate_from_params(d["kind"], d["targets"], [tuple(c) for c in d.get("controls", [])],
                            d.get("params", {}), matrix)


def circuit_to_dict(circuit):
    return {
        "schema": SCHEMA_VERSION,
        "register": list(circuit.register.radices),
        "ancillas": list(circuit.ancillas),
        "gates": [gate_to_dict(g) for g in circuit.gates],
        "sections": {k: list(v) for k, v in circuit.sections.items()},
        "meta": circuit.meta,
    }


def circuit_from_dict(d):
    if d.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported circuit schema {d.get('schema')!r}")
    return Circuit(
        Register(d["register"]),
        tuple(gate_from_dict(g) for g in d["gates"]),
        tuple(d.get("ancillas", ())),
        dict(d.get("meta", {})),
        {k: tuple(v) for k, v in d.get("sections", {}).items()},
    )


def dumps(circuit):
    return json.dumps(circuit_to_dict(circuit), sort_keys=True)
