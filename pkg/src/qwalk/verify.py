"""Circuit-versus-oracle equivalence and gate-count scaling tables."""

from dataclasses import asdict, dataclass, field
import csv
import io
import json

import numpy as np

from .circuit import MAX_UNITARY_DIM, DimensionCapError, circuit_columns, gate_counts
from .families import (
    build_complete_bipartite,
    build_complete_qutrit,
    build_complete_selfloops,
    build_cycle_any,
    build_cycle_pow2,
    build_glued_tree,
    build_torus_grid,
)
from .permutations import rotation_circuit, transposition_circuit

DEFAULT_TOL = 1e-10
MAX_CHECK_ENTRIES = 2**24


@dataclass
class EquivalenceReport:
    family: str
    params: dict
    deviation: float
    leakage: float
    tol: float
    passed: bool
    register_dim: int
    arcs: int

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def check_equivalence(circuit, encoding, walk_op, tol=DEFAULT_TOL):
    """Compare circuit columns at every encoded arc with the encoded oracle columns.

    ``deviation`` is the largest entrywise error on valid rows; ``leakage`` the
    largest probability mass any valid input sends to empty labels.  No global
    phase is factored out.
    """
    reg = circuit.register
    if tuple(reg.radices) != tuple(encoding.register.radices):
        raise ValueError("encoding register does not match circuit register")
    if walk_op.arcs.size != len(encoding.labels):
        raise ValueError(f"oracle has {walk_op.arcs.size} arcs, encoding has {len(encoding.labels)}")
    if reg.dim > MAX_UNITARY_DIM or reg.dim * len(encoding.labels) > MAX_CHECK_ENTRIES:
        raise DimensionCapError(
            f"checking {len(encoding.labels)} columns of a {reg.dim}-dim circuit exceeds the cap"
        )
    cols = circuit_columns(circuit, encoding.labels)
    expected = walk_op.dense()
    deviation = float(np.max(np.abs(cols[encoding.labels, :] - expected))) if expected.size else 0.0
    invalid = ~encoding.valid_mask
    leakage = float(np.max(np.sum(np.abs(cols[invalid, :]) ** 2, axis=0))) if invalid.any() else 0.0
    params = {k: v for k, v in circuit.meta.items() if k not in ("family",)}
    return EquivalenceReport(
        family=str(circuit.meta.get("family", "?")),
        params=params,
        deviation=deviation,
        leakage=leakage,
        tol=tol,
        passed=bool(deviation <= tol and leakage <= tol),
        register_dim=reg.dim,
        arcs=len(encoding.labels),
    )


@dataclass
class ScalingRow:
    param: int
    qubits: int
    counts: object
    formula: int
    extra: dict = field(default_factory=dict)


def _scaling_circuit(family, p, coin):
    if family == "cycle":
        return build_cycle_pow2(p, coin or "hadamard")[0]
    if family == "cycle-any":
        return build_cycle_any(p, coin or "hadamard")[0]
    if family == "complete":
        return build_complete_selfloops(p, coin or "hadamard")[0]
    if family == "bipartite":
        return build_complete_bipartite(p)[0]
    if family == "glued-tree":
        return build_glued_tree(p)[0]
    if family == "complete-qutrit":
        return build_complete_qutrit(p, coin or "t")[0]
    if family == "torus":
        return build_torus_grid([p, p], coin or "grover")[0]
    if family == "transposition":
        return transposition_circuit(p, 0, 2**p - 1)
    if family == "rotation":
        return rotation_circuit(p, 2**p - 1)
    raise ValueError(f"no scaling table for family {family!r}")


SCALING_FAMILIES = ("cycle", "cycle-any", "complete", "bipartite", "glued-tree",
                    "complete-qutrit", "torus", "transposition", "rotation")


def _formula(family, circuit, p):
    meta = circuit.meta
    if family == "rotation":
        return p * (p + 1) // 2
    return int(meta["predicted_gates"])


def scaling_report(family, params, coin=None):
    rows = []
    for p in sorted(params):
        c = _scaling_circuit(family, p, coin)
        rows.append(ScalingRow(p, c.data_wires, gate_counts(c), _formula(family, c, p)))
    return rows


BASE_COLUMNS = ["param", "qubits", "H", "CNOT"]
TAIL_COLUMNS = ["custom", "formula", "single", "generalized_cnot", "total", "c2not_equivalent"]


def scaling_csv(rows):
    ks = sorted({k for r in rows for k in r.counts.ckn})
    header = BASE_COLUMNS + [f"C{k}NOT" for k in ks] + TAIL_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        c = r.counts
        w.writerow([r.param, r.qubits, c.hadamard, c.cnot]
                   + [c.ckn.get(k, 0) for k in ks]
                   + [c.custom, r.formula, c.single, c.generalized_cnot, c.total, c.c2not_equivalent])
    return buf.getvalue()


def affine_fit(xs, ys):
    """Least-squares ``y = a*x + b``; returns ``(a, b, max_abs_residual)``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    A = np.vstack([xs, np.ones_like(xs)]).T
    (a, b), *_ = np.linalg.lstsq(A, ys, rcond=None)
    return float(a), float(b), float(np.max(np.abs(A @ [a, b] - ys)))
