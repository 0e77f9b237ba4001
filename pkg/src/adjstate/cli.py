"""Command-line interface.

Exit codes: 0 success, 1 verification or agreement failure (including graphs
without edges), 2 usage or configuration error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import circuits, reference
from .errors import EmptyGraphError, ParseError, PostselectionError, ResourceError
from .estimators import AE_MODES, POVM, AE, PROPORTIONAL, EstimatorConfig, estimate_count
from .experiments import emit_csv, emit_raw, load_sweep_config, run_sweep
from .graph import MotifKind, count_motifs, er_generate, read_edge_list, write_edge_list
from .statevec import BYTES_PER_AMPLITUDE, DEFAULT_MAX_QUBITS, write_amplitudes_csv

FIDELITY_TOL = 1e-10
PROB_TOL = 1e-10


def _probability(text: str) -> float:
    x = float(text)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return x


def _positive_int(text: str) -> int:
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return x


def _motif(text: str) -> MotifKind:
    try:
        return MotifKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_gen(args) -> int:
    g = er_generate(args.n, args.p, args.seed)
    write_edge_list(g, args.out)
    print(f"wrote G({args.n}, {args.p}) seed={args.seed}: {g.edge_count} edges -> {args.out}")
    return 0


def cmd_state(args) -> int:
    g = read_edge_list(args.graph)
    if args.which == "adjacency":
        state = reference.adjacency_state(g)
    elif args.which == "degree":
        state = reference.degree_state(g)
    else:
        if args.vertex is None:
            raise ParseError("--which neighborhood requires --vertex")
        if not 0 <= args.vertex < g.n_vertices:
            raise ParseError(f"--vertex must lie in [0, {g.n_vertices})")
        state = reference.neighborhood_state(g, args.vertex)
    print(f"{args.which} state on {state.num_qubits} qubits, {len(state.amplitudes)} nonzero amplitudes")
    for index, amp in state.items():
        print(f"  |{index:0{state.num_qubits}b}>  {amp.real:.12f}  (|a|^2 = {state.probabilities[index]})")
    if args.emit:
        write_amplitudes_csv(args.emit, state.num_qubits, state.items())
        print(f"amplitudes -> {args.emit}")
    return 0


def _check_counts(plan, predicted, name, lines) -> bool:
    tallied = circuits.tally_gates(plan)
    ok = tallied == predicted
    lines.append(f"  {name} gate counts: {tallied} {'==' if ok else '!='} predicted {predicted}")
    return ok


def cmd_verify(args) -> int:
    g = read_edge_list(args.graph)
    if g.edge_count == 0:
        raise EmptyGraphError("graph has no edges; nothing to prepare")
    n = reference.label_bits(g.n_vertices)
    needed = 2 * n + 2
    if needed > args.max_qubits:
        raise ResourceError(f"adjacency circuit needs {needed} qubits, --max-qubits is {args.max_qubits}")
    budget = BYTES_PER_AMPLITUDE << args.max_qubits
    lines = []
    ok = True

    plan = circuits.build_u_d(g)
    res = circuits.simulate(plan, memory_budget=budget)
    fid = abs(np.vdot(circuits.working_amplitudes(plan, res.state),
                      reference.degree_state(g).to_vector())) ** 2
    prob = res.postselections[0][1]
    ok &= fid >= 1 - FIDELITY_TOL and abs(prob - 1) <= PROB_TOL
    lines.append(f"U_D: fidelity {fid:.15f}, ancilla P(1) {prob:.15f}")
    ok &= _check_counts(plan, circuits.predicted_counts(g, "UD"), "U_D", lines)

    worst_fid, worst_prob, counts_ok = 1.0, 1.0, True
    for r in range(g.n_vertices):
        if g.degree(r) == 0:
            continue
        plan = circuits.build_u_r(g, r)
        res = circuits.simulate(plan, memory_budget=budget)
        fid = abs(np.vdot(circuits.working_amplitudes(plan, res.state),
                          reference.neighborhood_state(g, r).to_vector())) ** 2
        worst_fid = min(worst_fid, fid)
        worst_prob = min(worst_prob, res.postselections[0][1])
        counts_ok &= circuits.tally_gates(plan) == circuits.predicted_counts(g, "Ur", r)
    ok &= worst_fid >= 1 - FIDELITY_TOL and abs(worst_prob - 1) <= PROB_TOL and counts_ok
    lines.append(f"U^(r), all non-isolated r: min fidelity {worst_fid:.15f}, "
                 f"min ancilla P(1) {worst_prob:.15f}, gate counts {'match' if counts_ok else 'MISMATCH'}")

    plan = circuits.build_adjacency_circuit(g)
    res = circuits.simulate(plan, memory_budget=budget)
    fid = abs(np.vdot(circuits.working_amplitudes(plan, res.state),
                      reference.adjacency_state(g).to_vector())) ** 2
    probs = [p for _, p in res.postselections]
    ok &= fid >= 1 - FIDELITY_TOL and all(abs(p - 1) <= PROB_TOL for p in probs)
    lines.append(f"adjacency: fidelity {fid:.15f}, ancilla P(1) "
                 + ", ".join(f"{p:.15f}" for p in probs))
    ok &= _check_counts(plan, circuits.predicted_counts(g, "Adjacency"), "adjacency", lines)
    closed = circuits.closed_form_counts(g, "Adjacency")
    lines.append(f"  closed form without the label-0 correction: {closed['toffoli']} Toffoli, {closed['cnot']} CNOT")

    print("\n".join(lines))
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_count(args) -> int:
    g = read_edge_list(args.graph)
    kind = args.motif
    if args.method == "exact":
        print(count_motifs(g, kind))
        return 0
    sp = reference.success_probability(g, kind)
    if args.method == "formula":
        print(f"{sp} ~= {sp.value:.17g}")
        return 0
    oracle = reference.projector_expectation_oracle(g, kind)
    agree = oracle == sp.fraction
    print(f"oracle {oracle} ~= {float(oracle):.17g}; formula {sp}; agree: {'yes' if agree else 'NO'}")
    return 0 if agree else 1


def cmd_estimate(args) -> int:
    g = read_edge_list(args.graph)
    cfg = EstimatorConfig(args.eps, args.delta, args.method, args.ae_scale, args.seed, args.ae_mode)
    res = estimate_count(g, args.motif, cfg)
    label = "shots T" if args.method == POVM else "queries M"
    print(f"p_hat {res.p_hat:.17g}")
    print(f"count estimate {res.count_hat:.17g}")
    print(f"{label} {res.shots_or_queries}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    out = args.out or cfg.output
    if out is None:
        raise ParseError("no output path: pass --out or set 'output' in the config")
    report = run_sweep(cfg)
    emit_csv(report, out)
    if args.raw:
        emit_raw(report, args.raw)
    undefined = sum(c.undefined for c in report.cells)
    print(f"{len(report.cells)} cells -> {out}" + (f" ({undefined} undefined)" if undefined else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adjstate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample an Erdos-Renyi graph")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("state", help="print or dump an analytic reference state")
    p.add_argument("--graph", required=True)
    p.add_argument("--which", choices=["adjacency", "degree", "neighborhood"], required=True)
    p.add_argument("--vertex", type=int)
    p.add_argument("--emit", help="write index,basis_bits,re,im CSV here")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("verify", help="simulate the preparation circuits and check them")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-qubits", type=_positive_int, default=DEFAULT_MAX_QUBITS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="exact count, success probability, or oracle check")
    p.add_argument("--graph", required=True)
    p.add_argument("--motif", type=_motif, required=True)
    p.add_argument("--method", choices=["exact", "formula", "oracle"], default="exact")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("estimate", help="estimate a motif count by POVM or AE")
    p.add_argument("--graph", required=True)
    p.add_argument("--motif", type=_motif, required=True)
    p.add_argument("--method", choices=[POVM, AE], required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ae-scale", type=float, default=1.0)
    p.add_argument("--ae-mode", choices=AE_MODES, default=PROPORTIONAL)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="run an ER sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--raw", help="also write per-instance estimates here")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except (EmptyGraphError, PostselectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
