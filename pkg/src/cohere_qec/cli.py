"""Command-line interface.

Subcommands:

* ``demo two|three``  -- print the pipeline walkthrough for a chosen error.
* ``table three|nine`` -- print the decode error tables and diff them
  against the transcribed reference tables.
* ``check`` -- run the structural incoherence audit over every protocol
  operation, and confirm the conditional phase flip counterexample fails it.
* ``sweep`` -- run a (theta, e, d) fidelity sweep and write a CSV.

Exit codes: 0 success, 1 contract failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Sequence

import numpy as np

from . import codes
from .channels import ErrorModel, no_error, pauli_error, superposed_error
from .coherence import is_incoherent_kraus_set, l1_coherence
from .gates import cluster_encode_u1, cnot, cz_132, cz_pm
from .states import (
    KrausSet,
    Operator,
    PureState,
    embed_and_apply,
    fidelity,
    ket,
    tensor,
)
from .experiments import SweepConfig, emit_csv, run_sweep

__all__ = ["cli_main", "main"]


class UsageError(Exception):
    pass


def _parse_scalar(token: str) -> float:
    tok = token.strip().lower()
    try:
        if tok == "pi":
            return math.pi
        if tok.startswith("pi/"):
            return math.pi / float(tok[3:])
        return float(tok)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number {token!r} (use a float, 'pi' or 'pi/N')") from None


def _parse_grid(token: str) -> tuple[float, ...]:
    """Grid syntax: ``start:stop:count`` or a single value."""
    parts = token.split(":")
    if len(parts) == 1:
        return (_parse_scalar(parts[0]),)
    if len(parts) != 3:
        raise UsageError(f"grid {token!r} must be 'start:stop:count' or a single value")
    start, stop = _parse_scalar(parts[0]), _parse_scalar(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise UsageError(f"grid count {parts[2]!r} is not an integer") from None
    if count < 1:
        raise UsageError("grid count must be >= 1")
    return tuple(float(v) for v in np.linspace(start, stop, count))


def _format_amplitude(z: complex) -> str:
    if abs(z.imag) < 1e-9:
        return f"{z.real:+.4f}"
    return f"+({z.real:.4f}{z.imag:+.4f}i)"


def format_state(state: PureState, tol: float = 1e-9) -> str:
    n = state.n_qubits
    terms = [
        f"{_format_amplitude(amp)}|{format(idx, f'0{n}b')}>"
        for idx, amp in enumerate(state.amplitudes)
        if abs(amp) > tol
    ]
    return " ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------


def _demo_error(name: str, n_qubits: int):
    name = name.lower()
    if name == "none":
        return no_error()
    if name.startswith("z") and name[1:].isdigit():
        pos = int(name[1:])
        if not 1 <= pos <= n_qubits:
            raise UsageError(f"error position in {name!r} outside the code")
        return pauli_error("Z", pos)
    if name == "superposed":
        s = 1.0 / math.sqrt(2.0)
        return superposed_error(s, s, 2)
    raise UsageError(f"unknown demo error {name!r}")


def _apply_demo_error(state: PureState, error: ErrorModel) -> PureState:
    branch = codes._single_branch_matrix(error)
    if branch is None:
        return state
    op = Operator(1, branch, unitary_flag=error.kind == "pauli")
    return embed_and_apply(op, [error.position], state)


def _cmd_demo(args: argparse.Namespace) -> int:
    theta = _parse_scalar(args.theta)
    psi = codes.data_state(theta)
    print(f"data state      |psi> = {format_state(psi)}")
    if args.code == "two":
        error = _demo_error(args.error, 2)
        state = tensor([ket("+"), psi])
        print(f"initial         {format_state(state)}")
        state = embed_and_apply(cnot(1, 2), [1, 2], state)
        print(f"encoded CNOT_12 {format_state(state)}")
        state = _apply_demo_error(state, error)
        print(f"after error     {format_state(state)}")
        state = embed_and_apply(cnot(1, 2), [1, 2], state)
        state = embed_and_apply(cz_pm(1, 2), [1, 2], state)
        print(f"decoded         {format_state(state)}")
        recovered, absorbed = codes.two_qubit_pipeline(psi, error)
        print(f"recovered data qubit fidelity with |psi>: {fidelity(psi, recovered):.12f}")
        print(f"absorbing ancilla l1 coherence: {l1_coherence(absorbed):.12f}")
        return 0

    error = _demo_error(args.error, 3)
    u1 = cluster_encode_u1((1, 2, 3))
    state = tensor([ket("+"), psi, ket("+")])
    print(f"initial         {format_state(state)}")
    state = embed_and_apply(u1, [1, 2, 3], state)
    print(f"encoded U1      {format_state(state)}")
    state = _apply_demo_error(state, error)
    print(f"after error     {format_state(state)}")
    state = embed_and_apply(u1.dagger(), [1, 2, 3], state)
    print(f"decoded U1^dag  {format_state(state)}")
    A = codes._measurement_branches_pure(state.amplitudes, 3, codes.THREE_MEASUREMENT_PLAN)
    probs = np.sum(np.abs(A) ** 2, axis=1)
    for o, p in enumerate(probs):
        if p > 1e-12:
            bits = format(o, "02b")
            correction = " -> feed-forward Z on data" if bits == "11" else ""
            print(f"outcome (q1,q3) = ({bits[0]},{bits[1]}): probability {p:.6f}{correction}")
    recovered = codes.three_qubit_pipeline(psi, error)
    print(f"recovered data qubit fidelity with |psi>: {fidelity(psi, recovered):.12f}")
    return 0


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def _diff_table(rows, reference) -> tuple[list[str], bool]:
    lines = []
    ok = True
    for row, (label, col0, col1, sign) in zip(rows, reference):
        dev0 = float(np.max(np.abs(row.decoded_on_zero.amplitudes - col0)))
        dev1 = float(np.max(np.abs(row.decoded_on_one.amplitudes - col1)))
        dev = max(dev0, dev1)
        status = "OK" if dev <= 1e-12 and row.sign == sign else "DIFF"
        if status == "DIFF":
            ok = False
        lines.append(f"{row.error_label:8s} sign {row.sign:+d}  max|delta| = {dev:.2e}  {status}")
    return lines, ok


def _cmd_table(args: argparse.Namespace) -> int:
    if args.code == "three":
        rows = codes.error_table_three()
        reference = codes.reference_table_three()
        print("three-qubit phase-flip decode table (columns: |0_l>, |1_l> inputs)")
    else:
        rows = codes.error_table_nine()
        reference = codes.reference_table_nine()
        print("nine-qubit bit-flip decode table (columns: logical +/- inputs)")
    lines, ok = _diff_table(rows, reference)
    for line in lines:
        print(line)
    if not ok:
        print("table mismatch against the reference", file=sys.stderr)
        return 1
    print("all rows match the reference within 1e-12")
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _cmd_check(args: argparse.Namespace) -> int:
    failures = 0
    for name, channel in codes.protocol_channel_zoo():
        diag = is_incoherent_kraus_set(channel)
        if diag.ok:
            print(f"PASS {name}: structurally incoherent")
        else:
            failures += 1
            print(f"FAIL {name}: offending (operator, column) pairs {diag.offending}")
    counter = cz_132(1, 2, 3)
    diag = is_incoherent_kraus_set(KrausSet.from_unitary(counter))
    if diag.ok:
        failures += 1
        print("FAIL cz_132: unexpectedly passed the structural check")
    else:
        print(f"PASS cz_132: not incoherent, as required ({len(diag.offending)} offending columns)")
    # The defining counterexample: an incoherent input becomes entangled.
    out = embed_and_apply(counter, [1, 2, 3], ket("010"))
    expected = np.zeros(8, dtype=complex)
    expected[[2, 3, 6]] = 0.5
    expected[7] = -0.5
    dev = float(np.max(np.abs(out.amplitudes - expected)))
    if dev <= 1e-12:
        print(f"PASS cz_132 on |010>: entangled coherent output, max|delta| = {dev:.2e}")
        print(f"     {format_state(out)}")
    else:
        failures += 1
        print(f"FAIL cz_132 on |010>: deviation {dev:.2e} from the expected output")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    print("incoherence audit passed: cz_132 is the sole (expected) failure")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.theta is not None and args.theta_grid is not None:
        raise UsageError("give either --theta or --theta-grid, not both")
    if args.theta is not None:
        theta_grid = (_parse_scalar(args.theta),)
    elif args.theta_grid is not None:
        theta_grid = _parse_grid(args.theta_grid)
    else:
        raise UsageError("a theta value or grid is required")
    if args.e_grid is None or args.d_grid is None:
        raise UsageError("--e-grid and --d-grid are required")
    placement = None
    if args.placement != "averaged":
        try:
            placement = int(args.placement)
        except ValueError:
            raise UsageError(f"--placement must be 'averaged' or a position 1..9") from None
    try:
        config = SweepConfig(
            theta_grid=theta_grid,
            e_grid=_parse_grid(args.e_grid),
            d_grid=_parse_grid(args.d_grid),
            placement=placement,
            output_path=args.out,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    start = time.perf_counter()
    records = run_sweep(config)
    emit_csv(records, args.out)
    elapsed = time.perf_counter() - start
    print(f"wrote {args.out}: {len(records)} records in {elapsed:.1f} s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohere-qec",
        description="Coherence-consuming error-correction protocols: demos, tables, audits, sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_demo = sub.add_parser("demo", help="walk through a pipeline step by step")
    p_demo.add_argument("code", choices=("two", "three"))
    p_demo.add_argument("--error", default="z2", help="none, z<position>, or superposed")
    p_demo.add_argument("--theta", default="pi/3", help="data-state polar angle")
    p_demo.set_defaults(func=_cmd_demo)

    p_table = sub.add_parser("table", help="print and verify the decode error tables")
    p_table.add_argument("code", choices=("three", "nine"))
    p_table.set_defaults(func=_cmd_table)

    p_check = sub.add_parser("check", help="incoherence audit of all protocol operations")
    p_check.set_defaults(func=_cmd_check)

    p_sweep = sub.add_parser("sweep", help="run a fidelity sweep and write CSV")
    p_sweep.add_argument("--theta", default=None, help="single theta value (e.g. pi/4)")
    p_sweep.add_argument("--theta-grid", default=None, help="start:stop:count, 'pi' allowed")
    p_sweep.add_argument("--e-grid", default=None, help="input-noise grid, start:stop:count")
    p_sweep.add_argument("--d-grid", default=None, help="depolarizing grid, start:stop:count")
    p_sweep.add_argument(
        "--placement", default="averaged", help="'averaged' or a fixed register position 1..9"
    )
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
