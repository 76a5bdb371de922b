"""Command-line interface emitting CSV/JSON artifacts for every subsystem.

Exit codes: 0 on success, 1 on validation or spectral errors (a JSON error
object goes to stderr), 2 on flag errors.  Identical invocations write
byte-identical files.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .applications import (
    bifurcation_scan,
    iterates_to_csv,
    median_period_curve,
    mu_grid,
    records_to_csv,
    snap_mu,
    ecc_bitflip_channel,
)
from .channels import (
    DensityOperator,
    apply_channel,
    matrix_from_json,
    matrix_to_json,
    random_density,
)
from .circuits import GeneratedChannelCircuit, gcd_trace
from .discrete import DiscreteFunction, analyze
from .enumeration import (
    build_catalog,
    catalog_to_csv,
    catalog_to_json,
    count_functions_bruteforce,
    count_functions_formula,
)
from .errors import FunchanError, ValidationError
from .families import (
    DisjointSetFamily,
    all_functions,
    enumerate_valid_families,
    generate_kraus,
)
from .liouville import channel_spectrum, report_to_json


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_table(raw: str, n: int) -> DiscreteFunction:
    try:
        table = tuple(int(tok) for tok in raw.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad table literal {raw!r}: {exc}") from exc
    if len(table) != n:
        raise ValidationError(f"table has {len(table)} entries, expected {n}")
    return DiscreteFunction(n, table)


def _parse_rho(raw: str, n: int) -> DensityOperator:
    if raw.startswith("basis:"):
        return DensityOperator.basis_state(n, int(raw.split(":", 1)[1]))
    with open(raw, encoding="utf-8") as fh:
        rho = DensityOperator(matrix_from_json(json.load(fh)))
    if rho.dim != n:
        raise ValidationError(f"state file has dim {rho.dim}, expected {n}")
    return rho


def _parse_amplitudes(raw: str, n_bits: int = 3) -> np.ndarray:
    """ECC input: a bitstring like 100, or terms like 001=0.6,110=0.8j."""
    amps = np.zeros(2**n_bits, dtype=complex)
    for term in raw.split(","):
        if "=" in term:
            bits, value = term.split("=", 1)
            amps[int(bits.strip(), 2)] += complex(value)
        else:
            amps[int(term.strip(), 2)] += 1.0
    if not np.any(amps):
        raise ValidationError(f"input state {raw!r} has no support")
    return amps


def _cmd_orbit(args) -> int:
    f = _parse_table(args.table, args.n)
    f(args.x0)  # range check before any indexing
    info = analyze(f)
    steps = args.steps if args.steps is not None else info.link_length_of[args.x0] + info.period_of[args.x0]
    trajectory = [args.x0]
    for _ in range(steps):
        trajectory.append(f.table[trajectory[-1]])
    payload = {
        "x0": args.x0,
        "orbit": trajectory,
        "period": info.period_of[args.x0],
        "link_length": info.link_length_of[args.x0],
    }
    if args.format == "json":
        _write_output(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        out = io.StringIO()
        out.write("k,value\n")
        for k, v in enumerate(trajectory):
            out.write(f"{k},{v}\n")
        out.write(
            f"# period={payload['period']} link_length={payload['link_length']}\n"
        )
        _write_output(out.getvalue(), args.output)
    return 0


def _resolve_mu_bounds(args) -> tuple[Fraction, Fraction]:
    if args.mu_exact:
        num, _, den = args.mu_exact.partition("/")
        exact = Fraction(int(num), int(den or "1"))
        snapped, is_exact = snap_mu(exact, args.qubits)
        if not is_exact:
            raise FunchanError(
                f"--mu-exact {args.mu_exact} is not representable as p/2^{args.qubits}"
            )
        return snapped, snapped
    lo, lo_exact = snap_mu(args.mu_min, args.qubits)
    hi, hi_exact = snap_mu(args.mu_max, args.qubits)
    if not (lo_exact and hi_exact):
        print(
            f"note: snapped mu range to [{lo}, {hi}] on the 2^-{args.qubits} grid",
            file=sys.stderr,
        )
    return lo, hi


def _cmd_bifurcation(args) -> int:
    lo, hi = _resolve_mu_bounds(args)
    size = 2**args.qubits
    if args.all_x0:
        starts = list(range(size))
    elif args.x0:
        starts = [int(tok) for tok in args.x0.split(",")]
    else:
        starts = [size // 2]
    result = bifurcation_scan(
        args.qubits, mu_grid(args.qubits, lo, hi), starts, args.settle, args.sample
    )
    _write_output(records_to_csv(result.records), args.output)
    if args.iterates:
        _write_output(iterates_to_csv(result.iterates), args.iterates)
    if args.median:
        curve = median_period_curve(result.records)
        out = io.StringIO()
        out.write("mu,median_period\n")
        for mu, med in curve:
            out.write(f"{float(mu)!r},{med}\n")
        _write_output(out.getvalue(), args.median)
    if args.plot:
        from .plotting import bifurcation_figure

        bifurcation_figure(result, args.plot)
    if args.plot_panels:
        from .plotting import orbit_structure_figure

        orbit_structure_figure(result, args.plot_panels)
    return 0


def _cmd_channel_spectrum(args) -> int:
    f = _parse_table(args.table, args.n)
    family = DisjointSetFamily.parse(args.family, args.n)
    channel = generate_kraus(f, family)
    report = channel_spectrum(channel.kraus)
    if args.format == "csv":
        out = io.StringIO()
        out.write("re,im,class,order\n")
        for value, cls in zip(report.eigenvalues, report.classifications):
            order = "" if cls.order is None else cls.order
            out.write(f"{round(value.real, 12)!r},{round(value.imag, 12)!r},{cls.kind},{order}\n")
        _write_output(out.getvalue(), args.output)
    else:
        payload = report_to_json(report, include_eigenvectors=args.eigenvectors)
        _write_output(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_channel_iterate(args) -> int:
    f = _parse_table(args.table, args.n)
    family = DisjointSetFamily.parse(args.family, args.n)
    channel = generate_kraus(f, family)
    rho = _parse_rho(args.rho, args.n)
    states = [rho]
    for _ in range(args.steps):
        states.append(apply_channel(channel.kraus, states[-1]))
    if args.format == "csv":
        out = io.StringIO()
        out.write("step,row,col,re,im\n")
        for step, state in enumerate(states):
            for i in range(args.n):
                for j in range(args.n):
                    v = state.matrix[i, j]
                    out.write(
                        f"{step},{i},{j},{round(v.real, 12)!r},{round(v.imag, 12)!r}\n"
                    )
        _write_output(out.getvalue(), args.output)
    else:
        payload = [matrix_to_json(s.matrix) for s in states]
        _write_output(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_circuit_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    pairs = 0
    for f in all_functions(args.n):
        for family in enumerate_valid_families(f, args.max_rank):
            channel = generate_kraus(f, family)
            circuit = GeneratedChannelCircuit(f, family)
            for _ in range(args.inputs):
                rho = random_density(args.n, rng)
                via_circuit = circuit.run(rho)
                direct = apply_channel(channel.kraus, rho)
                diff = via_circuit.matrix - direct.matrix
                worst = max(worst, float(np.sqrt(abs(np.trace(diff @ diff.conj().T)))))
            pairs += 1
    payload = {
        "dim": args.n,
        "channel_family_pairs": pairs,
        "random_inputs_each": args.inputs,
        "max_discrepancy": worst,
        "tolerance": 1e-12,
        "passed": worst < 1e-12,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.output)
    return 0 if payload["passed"] else 1


def _cmd_gcd(args) -> int:
    trace = gcd_trace(args.a, args.b, args.dim)
    out = io.StringIO()
    for a, b in trace:
        out.write(f"({a}, {b})\n")
    out.write(f"# gcd={trace[-1][0]} steps={len(trace) - 1} dim={args.dim}\n")
    _write_output(out.getvalue(), args.output)
    return 0


def _cmd_count_functions(args) -> int:
    value = (
        count_functions_bruteforce(args.n)
        if args.brute_force
        else count_functions_formula(args.n)
    )
    _write_output(f"{value}\n", args.output)
    return 0


def _cmd_catalog(args) -> int:
    entries = build_catalog(args.n)
    text = catalog_to_csv(entries) if args.format == "csv" else catalog_to_json(entries)
    _write_output(text, args.output)
    return 0


def _cmd_ecc(args) -> int:
    channel = ecc_bitflip_channel(args.variant)
    rho = DensityOperator.pure(_parse_amplitudes(args.input))
    codespace = {0, 7}
    out = io.StringIO()
    state = rho
    for step in range(0, 4):
        diag = [round(float(state.matrix[i, i].real), 12) for i in range(8)]
        coherence = round(float(abs(state.matrix[0, 7])), 12)
        support = [i for i in range(8) if diag[i] > 1e-12]
        corrected = set(support) <= codespace
        out.write(
            json.dumps(
                {
                    "application": step,
                    "diagonal": diag,
                    "codeword_coherence": coherence,
                    "corrected": corrected,
                }
            )
            + "\n"
        )
        if corrected:
            break
        state = apply_channel(channel.kraus, state)
    _write_output(out.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funchan",
        description="Quantum channels generated from functions on finite sets",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="orbit, period, and link length of one start")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--table", required=True, help="comma-separated values of f")
    p.add_argument("--x0", type=int, required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("bifurcation", help="truncated logistic sweep to CSV")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--mu-min", default="0")
    p.add_argument("--mu-max", default="4")
    p.add_argument("--mu-exact", default=None, help="single exact value p/q")
    p.add_argument("--x0", default=None, help="comma-separated starts")
    p.add_argument("--all-x0", action="store_true")
    p.add_argument("--settle", type=int, default=20)
    p.add_argument("--sample", type=int, default=20)
    p.add_argument("-o", "--output", default=None, help="records CSV")
    p.add_argument("--iterates", default=None, help="write iterate stream CSV here")
    p.add_argument("--median", default=None, help="write median-period CSV here")
    p.add_argument("--plot", default=None, help="render the iterate scatter here")
    p.add_argument("--plot-panels", default=None, help="render the 4-panel summary here")
    p.set_defaults(func=_cmd_bifurcation)

    p = sub.add_parser("channel", help="spectral analysis and iteration")
    channel_sub = p.add_subparsers(dest="channel_command", required=True)

    ps = channel_sub.add_parser("spectrum", help="spectral report of a generated channel")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--table", required=True)
    ps.add_argument("--family", required=True, help='e.g. "(2,3)(0,1)"')
    ps.add_argument("--eigenvectors", action="store_true")
    ps.add_argument("--format", choices=("csv", "json"), default="json")
    ps.add_argument("-o", "--output", default=None)
    ps.set_defaults(func=_cmd_channel_spectrum)

    pi = channel_sub.add_parser("iterate", help="state trajectory under iteration")
    pi.add_argument("--n", type=int, required=True)
    pi.add_argument("--table", required=True)
    pi.add_argument("--family", required=True)
    pi.add_argument("--rho", required=True, help="JSON matrix file or basis:<k>")
    pi.add_argument("--steps", type=int, required=True)
    pi.add_argument("--format", choices=("csv", "json"), default="json")
    pi.add_argument("-o", "--output", default=None)
    pi.set_defaults(func=_cmd_channel_iterate)

    p = sub.add_parser("circuit", help="circuit realizations")
    circuit_sub = p.add_subparsers(dest="circuit_command", required=True)
    pv = circuit_sub.add_parser("verify", help="circuit vs Kraus equivalence sweep")
    pv.add_argument("--n", type=int, required=True)
    pv.add_argument("--max-rank", type=int, default=None)
    pv.add_argument("--inputs", type=int, default=50)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("-o", "--output", default=None)
    pv.set_defaults(func=_cmd_circuit_verify)

    p = sub.add_parser("gcd", help="iterate the Euclid channel on a basis state")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gcd)

    p = sub.add_parser("count-functions", help="functions on Z_n up to relabeling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_count_functions)

    p = sub.add_parser("catalog", help="full small-system channel catalog")
    p.add_argument("--n", type=int, choices=(2, 3), required=True)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("ecc", help="three-bit bit-flip correction trace")
    p.add_argument("--variant", choices=("simultaneous", "chain"), required=True)
    p.add_argument("--input", required=True, help='e.g. "100" or "001=0.6,110=0.8"')
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_ecc)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FunchanError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(error), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
