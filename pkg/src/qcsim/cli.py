"""Command-line front end: ``qcsim <subcommand> [flags]``.

Every subcommand takes ``--seed`` (default ``DEFAULT_SEED``); identical argv
gives byte-identical output. Exit codes: 0 success, 2 bad flags, 3 a size
limit was exceeded, 1 any other domain error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from qcsim import grover, hogg, protocols, qec, shor
from qcsim.circuit import parse, run
from qcsim.errors import CapacityError, DomainError
from qcsim.measure import Distribution, distribution_csv, measure, probabilities
from qcsim.qstate import StateVector, basis_state, format_dirac, parse_ket, random_state
from qcsim.rng import RngStream

DEFAULT_SEED = 1998

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _write_csvs(out_dir: str, step2: Distribution, qft: Distribution) -> None:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    for name, dist in (("step2.csv", step2), ("qft.csv", qft)):
        with open(d / name, "w", newline="\n") as fh:
            fh.write(distribution_csv(dist))


def _ket(state: StateVector) -> str:
    return format_dirac(state) or "0"


# -- subcommands ---------------------------------------------------------------------

def cmd_shor(args, out: TextIO) -> int:
    cfg = shor.FactoringConfig(
        M=args.M, seed=args.seed, max_attempts=args.max_attempts,
        skip_step2_measurement=args.skip_step2, a=args.a, u=args.u, v=args.v,
        allow_large=args.allow_large,
    )
    trace = shor.factor(cfg)
    for line in trace.lines():
        print(line, file=out)
    if args.emit_dist:
        if trace.step2_dist is None:
            raise DomainError("no quantum attempt ran, so there is no distribution to emit")
        _write_csvs(args.emit_dist, trace.step2_dist, trace.qft_dist)
    return EXIT_OK if trace.success else EXIT_DOMAIN


def cmd_grover(args, out: TextIO) -> int:
    p = grover.Predicate.from_solutions(args.n, args.solutions)
    res = grover.grover_search(p, args.iterations, RngStream(args.seed))
    print(f"n = {args.n}", file=out)
    print(f"solutions = {','.join(map(str, sorted(set(args.solutions))))}", file=out)
    print(f"iterations = {res.iterations}", file=out)
    print(f"success_probability = {res.success_probability_curve[-1]:.10f}", file=out)
    print(f"result = {res.result}", file=out)
    print(f"is_solution = {str(res.is_solution).lower()}", file=out)
    if args.curve:
        with open(args.curve, "w", newline="\n") as fh:
            fh.write(grover.curve_csv(res.success_probability_curve))
    return EXIT_OK


def cmd_bb84(args, out: TextIO) -> int:
    rep = protocols.bb84(args.bits, args.eve, RngStream(args.seed))
    for line in rep.lines():
        print(line, file=out)
    return EXIT_OK


def cmd_teleport(args, out: TextIO) -> int:
    rng = RngStream(args.seed)
    worst = 1.0
    for t in range(args.trials):
        phi = random_state(1, rng)
        res = protocols.teleport(phi, rng)
        fid = res.bob_final.fidelity(phi)
        worst = min(worst, fid)
        if args.trials <= 20:
            print(f"trial {t}: bits = {res.bits[0]}{res.bits[1]}, fidelity = {fid:.12f}", file=out)
    print(f"trials = {args.trials}", file=out)
    print(f"min_fidelity = {worst:.12f}", file=out)
    return EXIT_OK


def cmd_dense(args, out: TextIO) -> int:
    values = range(4) if args.value is None else [args.value]
    for value in values:
        sent = protocols.dense_encode(value)
        got = protocols.dense_decode(sent)
        print(f"value {value}: pair = {_ket(sent)}, decoded = {got}", file=out)
    return EXIT_OK


def cmd_qec_demo(args, out: TextIO) -> int:
    code = qec.bitflip_code()
    psi, err = qec.worked_example()
    enc = code.encode(psi)
    bad = qec.apply_error(err, enc)
    dist = qec.syndrome_distribution(code, bad)
    rep = qec.recover(code, bad, RngStream(args.seed), expected=enc)
    print(f"data: {_ket(psi)}", file=out)
    print(f"encoded: {_ket(enc)}", file=out)
    print("error: " + " + ".join(f"{e.real:g} {op.name}" for e, op in err.terms), file=out)
    print(f"corrupted: {_ket(bad)}", file=out)
    print("correction table:", file=out)
    for syn, name in qec.correctable_words(code):
        print(f"  {syn} -> {name}", file=out)
    print("syndrome distribution:", file=out)
    for syn, p in dist.as_dict(cutoff=1e-12).items():
        print(f"  {format(syn, f'0{code.n_anc}b')}: {p:.10f}", file=out)
    print(f"measured syndrome: {rep.syndrome_bits(code.n_anc)}", file=out)
    print(f"correction: {rep.applied_correction}", file=out)
    print(f"recovered: {_ket(rep.final_state)}", file=out)
    print(f"fidelity: {rep.fidelity_to_encoded:.12f}", file=out)
    return EXIT_OK


def cmd_hogg(args, out: TextIO) -> int:
    if (args.vars, args.vals) == (2, 2):
        csp, label = hogg.demo_csp(), "demo (single solution v0=0, v1=1)"
    else:
        csp, label = hogg.consistency_csp(args.vars, args.vals), "consistency constraints only"
    res = hogg.hogg_search(csp, args.steps, args.method, hogg.PhasePolicy(args.policy), RngStream(args.seed))
    print(f"problem: {args.vars} variables x {args.vals} values, {label}", file=out)
    print(f"method = {args.method}, policy = {args.policy}, steps = {args.steps}", file=out)
    print(f"solution_probability = {res.solution_probability:.10f}", file=out)
    atoms = ", ".join(f"v{v}={x}" for v, x in sorted(res.assignment))
    print(f"measured set: {{{atoms}}} {csp.basis.ket(csp.set_to_mask(res.assignment))}", file=out)
    return EXIT_OK


def cmd_run(args, out: TextIO) -> int:
    text = sys.stdin.read() if args.circuit == "-" else Path(args.circuit).read_text()
    c = parse(text)
    state = basis_state(c.n_qubits, 0) if args.input is None else parse_ket(args.input)
    if state.n_qubits != c.n_qubits:
        raise DomainError(f"input has {state.n_qubits} qubits, circuit has {c.n_qubits}")
    final = run(c, state)
    print(f"final: {_ket(final)}", file=out)
    if args.measure is not None:
        m = measure(final, args.measure, RngStream(args.seed))
        bits = format(m.outcome, f"0{len(args.measure)}b")
        print(f"measured qubits {','.join(map(str, args.measure))}: {bits} (p = {m.probability:.10f})", file=out)
    return EXIT_OK


def cmd_qft_dist(args, out: TextIO) -> int:
    shor.validate_modulus(args.M, args.allow_large)
    m = shor.choose_m(args.M)
    if args.u is None:
        step2 = probabilities(shor.period_state(args.a, args.M, m), range(m))
    else:
        step2 = shor.step2_distribution(args.a, args.M, args.u)
    qft = shor.qft_distribution(args.a, args.M, args.u)
    _write_csvs(args.out, step2, qft)
    print(f"M = {args.M}, a = {args.a}, m = {m}, u = {'unmeasured' if args.u is None else args.u}", file=out)
    print(f"step-2 support = {len(step2.support())}", file=out)
    print(f"wrote {Path(args.out) / 'step2.csv'} and {Path(args.out) / 'qft.csv'}", file=out)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")

    p = argparse.ArgumentParser(prog="qcsim", description="State-vector quantum computing demos.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shor", parents=[common], help="factor M by period finding")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--a", type=int, help="force the base a")
    s.add_argument("--u", type=int, help="force the Step-2 readout")
    s.add_argument("--v", type=int, help="force the post-QFT readout")
    s.add_argument("--skip-step2", action="store_true", help="do not measure the output register")
    s.add_argument("--max-attempts", type=int, default=32)
    s.add_argument("--allow-large", action="store_true", help="raise the M limit from 64 to 512")
    s.add_argument("--emit-dist", metavar="DIR", help="write step2.csv and qft.csv into DIR")
    s.set_defaults(func=cmd_shor)

    s = sub.add_parser("grover", parents=[common], help="search for marked items")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--solutions", type=_int_list, required=True)
    s.add_argument("--iterations", type=int)
    s.add_argument("--curve", metavar="PATH", help="write the success curve as CSV")
    s.set_defaults(func=cmd_grover)

    s = sub.add_parser("bb84", parents=[common], help="quantum key distribution")
    s.add_argument("--bits", type=int, default=10000)
    s.add_argument("--eve", action="store_true")
    s.set_defaults(func=cmd_bb84)

    s = sub.add_parser("teleport", parents=[common], help="teleport random qubits")
    s.add_argument("--trials", type=int, default=1)
    s.set_defaults(func=cmd_teleport)

    s = sub.add_parser("dense", parents=[common], help="dense coding round trip")
    s.add_argument("--value", type=int, choices=range(4))
    s.set_defaults(func=cmd_dense)

    s = sub.add_parser("qec-demo", parents=[common], help="bit-flip code worked example")
    s.set_defaults(func=cmd_qec_demo)

    s = sub.add_parser("hogg", parents=[common], help="lattice search on a small CSP")
    s.add_argument("--vars", type=int, default=2)
    s.add_argument("--vals", type=int, default=2)
    s.add_argument("--method", type=int, choices=(1, 2), default=1)
    s.add_argument("--policy", choices=[p.value for p in hogg.PhasePolicy], default="invert")
    s.add_argument("--steps", type=int, default=2)
    s.set_defaults(func=cmd_hogg)

    s = sub.add_parser("run", parents=[common], help="execute a circuit file ('-' for stdin)")
    s.add_argument("circuit")
    s.add_argument("--input", help="initial basis ket, e.g. 11000")
    s.add_argument("--measure", type=_int_list, help="qubits to measure at the end")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("qft-dist", parents=[common], help="exact Step-2 and post-QFT distributions")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--u", type=int)
    s.add_argument("--allow-large", action="store_true")
    s.add_argument("--out", required=True, metavar="DIR")
    s.set_defaults(func=cmd_qft_dist)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args, out)
    except CapacityError as exc:
        print(f"qcsim: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, OSError) as exc:
        print(f"qcsim: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
