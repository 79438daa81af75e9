"""Command line: ``qwalk {build,simulate,verify,counts,permute}``.

Exit codes: 0 success / equivalence passed, 1 equivalence failed,
2 invalid input, 3 dimension cap exceeded.
"""

import argparse
import json
import sys

import numpy as np

from .circuit import DimensionCapError, circuit_from_dict, circuit_to_dict, run
from .families import BUILDERS, Encoding, FamilySpec, build_family, oracle
from .permutations import (
    block_permutation_circuit,
    rotation_circuit,
    transposition_circuit,
)
from .sim import StateVector, node_distribution
from .verify import DEFAULT_TOL, SCALING_FAMILIES, check_equivalence, scaling_csv, scaling_report
from .walk import Graph, simulate_walk, walk_unitary

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _exact_log(value, base):
    k, x = 0, 1
    while x < value:
        x *= base
        k += 1
    if x != value:
        raise ValueError(f"size {value} is not a power of {base}")
    return k


def spec_from_args(args):
    if args.spec:
        text = args.spec
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        return FamilySpec.from_dict(json.loads(text))
    if not args.family:
        raise ValueError("either --family or --spec is required")
    fam = args.family
    p = {}
    if args.coin:
        p["coin"] = args.coin
    if fam == "cycle":
        if args.size is not None:
            p["size"] = args.size
            if args.size < 2:
                raise ValueError(f"cycle size must be >= 2, got {args.size}")
        elif args.size_exp is not None:
            p["exponent"] = args.size_exp
        else:
            raise ValueError("cycle needs --size or --size-exp")
    elif fam in ("complete", "bipartite", "complete-qutrit"):
        base = 3 if fam == "complete-qutrit" else 2
        if args.size_exp is not None:
            p["n"] = args.size_exp
        elif args.size is not None:
            p["n"] = _exact_log(args.size, base)
        else:
            raise ValueError(f"{fam} needs --size-exp or --size")
        if fam == "bipartite":
            p.pop("coin", None)
    elif fam == "torus":
        if args.dims:
            p["dims"] = _ints(args.dims)
        elif args.sizes:
            p["dims"] = [_exact_log(s, 2) for s in _ints(args.sizes)]
        else:
            raise ValueError("torus needs --dims or --sizes")
    elif fam == "twisted-torus":
        p["sizes"] = _ints(args.sizes) if args.sizes else [8, 8, 4]
        p["twists"] = _ints(args.twists) if args.twists else [0] * len(p["sizes"])
    elif fam == "glued-tree":
        if args.depth is None:
            raise ValueError("glued-tree needs --depth")
        p["depth"] = args.depth
    else:
        raise ValueError(f"unknown family {fam!r}")
    return FamilySpec(fam, p)


def bundle(circuit, encoding=None, spec=None):
    out = circuit_to_dict(circuit)
    if encoding is not None:
        out["encoding"] = encoding.to_dict()
    if spec is not None:
        out["spec"] = spec.to_dict()
    return out


def load_bundle(path):
    with open(path) as fh:
        d = json.load(fh)
    circuit = circuit_from_dict(d)
    enc = Encoding.from_dict(d["encoding"]) if "encoding" in d else None
    return circuit, enc


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dist_rows(step, dist):
    return [f"{step},{v},{p:.12g}" for v, p in enumerate(dist)]


def cmd_build(args):
    spec = spec_from_args(args)
    circuit, _, enc = build_family(spec)
    _write(json.dumps(bundle(circuit, enc, spec), sort_keys=True) + "\n", args.output)
    return 0


def _initial_arc_amplitudes(args, n_arcs, index_of):
    if args.amplitudes:
        with open(args.amplitudes) as fh:
            raw = json.load(fh)
        psi = np.array([complex(*z) if isinstance(z, list) else complex(z) for z in raw])
        if psi.shape != (n_arcs,):
            raise ValueError(f"amplitude file has {len(psi)} entries, expected {n_arcs}")
        if abs(np.linalg.norm(psi) - 1) > 1e-10:
            raise ValueError("initial amplitudes are not normalized")
        return psi
    psi = np.zeros(n_arcs, dtype=complex)
    psi[index_of(args.start_vertex, args.start_coin)] = 1.0
    return psi


def cmd_simulate(args):
    if args.steps < 0:
        raise ValueError("--steps must be >= 0")
    lines = ["step,vertex,probability"]
    if args.graph:
        with open(args.graph) as fh:
            graph = Graph.from_json(fh.read())
        op = walk_unitary(graph, args.coin or "grover", args.shift)
        psi = _initial_arc_amplitudes(args, op.arcs.size, op.arcs.index)
        for t, dist in enumerate(simulate_walk(op, psi, args.steps)):
            lines += _dist_rows(t, dist)
    else:
        if args.circuit:
            circuit, enc = load_bundle(args.circuit)
            if enc is None:
                raise ValueError("circuit file carries no encoding")
        else:
            circuit, _, enc = build_family(spec_from_args(args))
        arc_amps = _initial_arc_amplitudes(args, len(enc.labels), enc.arcs.index)
        amps = np.zeros(circuit.register.dim, dtype=complex)
        amps[enc.labels] = arc_amps
        state = StateVector(circuit.register, amps)
        for t in range(args.steps + 1):
            if t:
                state = run(circuit, state, 1)
            dist = node_distribution(state, enc)
            lines += _dist_rows(t, [dist[v] for v in range(enc.num_vertices)])
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_verify(args):
    if args.circuit:
        circuit, enc = load_bundle(args.circuit)
        graph = enc.arcs.graph
    else:
        circuit, graph, enc = build_family(spec_from_args(args))
    try:
        report = check_equivalence(circuit, enc, oracle(graph, enc), args.tol)
    except DimensionCapError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    _write(report.to_json() + "\n", args.output)
    return 0 if report.passed else EXIT_FAIL


def _param_range(text):
    if ":" in text:
        lo, hi = (int(x) for x in text.split(":"))
        return list(range(lo, hi + 1))
    return _ints(text)


def cmd_counts(args):
    rows = scaling_report(args.family, _param_range(args.range), args.coin)
    _write(scaling_csv(rows), args.output)
    return 0


def cmd_permute(args):
    chosen = [x is not None for x in (args.rotate, args.transpose, args.block)]
    if sum(chosen) != 1:
        raise ValueError("choose exactly one of --rotate, --transpose, --block")
    if args.rotate is not None:
        circuit = rotation_circuit(args.n, args.rotate)
    elif args.transpose is not None:
        a, b = args.transpose
        circuit = transposition_circuit(args.n, a, b, args.style)
    else:
        if not args.table:
            raise ValueError("--block needs --table")
        circuit = block_permutation_circuit(args.n, args.block, _ints(args.table), args.style)
    _write(json.dumps(bundle(circuit), sort_keys=True) + "\n", args.output)
    return 0


def _family_args(p):
    p.add_argument("--family", choices=sorted(BUILDERS))
    p.add_argument("--spec", help="FamilySpec as inline JSON or a path to a JSON file")
    p.add_argument("--size", type=int, help="vertex count (cycle) or total size")
    p.add_argument("--size-exp", type=int, help="size exponent n (2^n or 3^n vertices)")
    p.add_argument("--coin", help="hadamard | grover | m | t | t+ | t-")
    p.add_argument("--dims", help="torus dimension exponents, e.g. 2,2")
    p.add_argument("--sizes", help="torus sizes, e.g. 8,8,4")
    p.add_argument("--twists", help="twisted-torus wrap offsets, e.g. 1,0,0")
    p.add_argument("--depth", type=int, help="glued-tree depth")


def make_parser():
    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a one-step circuit as JSON")
    _family_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="per-step vertex distributions as CSV")
    _family_args(p)
    p.add_argument("--circuit", help="circuit JSON written by 'build'")
    p.add_argument("--graph", help="graph JSON; simulates the arc-space walk directly")
    p.add_argument("--shift", default="flip-flop", help="shift mode for --graph")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--start-vertex", type=int, default=0)
    p.add_argument("--start-coin", type=int, default=0)
    p.add_argument("--amplitudes", help="JSON list of arc amplitudes ([re, im] pairs)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a circuit against its arc-space walk operator")
    _family_args(p)
    p.add_argument("--circuit", help="circuit JSON written by 'build'")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counts", help="gate-count scaling table as CSV")
    p.add_argument("--family", required=True, choices=SCALING_FAMILIES)
    p.add_argument("--range", required=True, help="lo:hi (inclusive) or comma list")
    p.add_argument("--coin")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("permute", help="synthesise a basis permutation circuit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rotate", type=int)
    p.add_argument("--transpose", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("--block", type=int, metavar="M")
    p.add_argument("--table", help="comma-separated permutation of 0..2^M-1")
    p.add_argument("--style", default="fanout", choices=("fanout", "path"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_permute)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionCapError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
