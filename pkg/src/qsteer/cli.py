"""Command-line front end.

Subcommands:
    radii            threshold table for one family over a range of d
    verify           run the invariant self-test suite
    conjecture-scan  per-rank radii and the minimizing rank over a d range
    bound            certify a state from a JSON file via the channel and
                     twirling criteria

Exit codes: 0 success, 1 verification failure, 2 input error,
3 solver non-convergence.  Output is CSV or JSON; ``--plot`` additionally
renders the table as a figure file.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import criteria, qops, radii
from .errors import SolverConvergenceError
from .lhs import povm_lower_bound_werner

RADII_CSV_HEADER = "d,R2_closed_form,R2_solver,R_PVM,POVM_lower_bound,S"
SCAN_CSV_HEADER = "family,d,n_ranks,achieving_rank,R2_min,R2_rank1"
RADII_SCHEMA = "qsteer.radii/1"
SCAN_SCHEMA = "qsteer.conjecture-scan/1"
BOUND_SCHEMA = "qsteer.bound/1"

_SCALAR_D_MAX = 100_000
_MATRIX_D_MAX = 8


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".12g")


def _family(name: str, d: int) -> radii.StateFamily:
    return radii.StateFamily(radii.FamilyKind(name), d)


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")


def _check_d_range(d_min: int, d_max: int, cap: int) -> None:
    if not 2 <= d_min <= d_max <= cap:
        raise ValueError(f"need 2 <= d-min <= d-max <= {cap}, got [{d_min}, {d_max}]")


def _radii_rows(family_name: str, d_min: int, d_max: int) -> list[dict]:
    rows = []
    for d in range(d_min, d_max + 1):
        family = _family(family_name, d)
        refs = radii.reference_thresholds(family)
        solved = radii.critical_radius_dichotomic(family)
        povm_lb = None
        if family.kind is radii.FamilyKind.WERNER:
            povm_lb = povm_lower_bound_werner(d)
        rows.append(
            {
                "d": d,
                "r2_closed_form": radii.closed_form_r2(family),
                "r2_solver": solved.value,
                "r_pvm": refs.projective,
                "povm_lower_bound": povm_lb,
                "separability": refs.separability,
            }
        )
    return rows


def cmd_radii(args: argparse.Namespace) -> int:
    _check_d_range(args.d_min, args.d_max, _SCALAR_D_MAX)
    rows = _radii_rows(args.family, args.d_min, args.d_max)
    if args.format == "csv":
        lines = [RADII_CSV_HEADER]
        for row in rows:
            lines.append(
                ",".join(
                    [
                        str(row["d"]),
                        _fmt(row["r2_closed_form"]),
                        _fmt(row["r2_solver"]),
                        _fmt(row["r_pvm"]),
                        _fmt(row["povm_lower_bound"]),
                        _fmt(row["separability"]),
                    ]
                )
            )
        _write_output("\n".join(lines), args.out)
    else:
        payload = {"schema": RADII_SCHEMA, "family": args.family, "rows": rows}
        _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    if args.plot:
        from .plotting import save_radii_figure

        save_radii_figure(rows, args.family, args.plot)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import run_verification

    report = run_verification(seed=args.seed, samples=args.samples)
    _write_output(json.dumps(report.as_dict(), indent=2, sort_keys=True), args.out)
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.measured:.3e} (threshold {check.threshold:.3e})",
              file=sys.stderr)
    return 0 if report.passed else 1


def cmd_conjecture_scan(args: argparse.Namespace) -> int:
    _check_d_range(args.d_min, args.d_max, _SCALAR_D_MAX)
    families = ["werner", "isotropic"] if args.family == "both" else [args.family]
    rows = []
    for name in families:
        for scan_row in radii.rank_minimality_scan(radii.FamilyKind(name), args.d_max, args.d_min):
            rows.append(
                {
                    "family": name,
                    "d": scan_row.d,
                    "n_ranks": len(scan_row.per_rank),
                    "achieving_rank": scan_row.achieving_rank,
                    "r2_min": scan_row.value,
                    "r2_rank1": scan_row.per_rank[0],
                    "per_rank": list(scan_row.per_rank),
                }
            )
    flagged = [(row["family"], row["d"]) for row in rows if row["achieving_rank"] != 1]
    if args.format == "csv":
        lines = [SCAN_CSV_HEADER]
        for row in rows:
            lines.append(
                ",".join(
                    [
                        row["family"],
                        str(row["d"]),
                        str(row["n_ranks"]),
                        str(row["achieving_rank"]),
                        _fmt(row["r2_min"]),
                        _fmt(row["r2_rank1"]),
                    ]
                )
            )
        _write_output("\n".join(lines), args.out)
    else:
        payload = {"schema": SCAN_SCHEMA, "flagged": [list(f) for f in flagged], "rows": rows}
        _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    if flagged:
        print(f"warning: achieving rank differs from 1 at {flagged}", file=sys.stderr)
    if args.plot:
        from .plotting import save_scan_figure

        save_scan_figure(rows, args.plot)
    return 0


def load_state_file(path: str) -> qops.BipartiteState:
    """Read a density matrix from JSON: dimA, dimB, row-major [re, im] pairs."""
    with open(path) as handle:
        data = json.load(handle)
    try:
        dim_a = int(data["dimA"])
        dim_b = int(data["dimB"])
        flat = data["matrix"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"state file must define dimA, dimB and matrix: {exc}") from exc
    n = dim_a * dim_b
    if len(flat) != n * n:
        raise ValueError(f"matrix must hold {n * n} entries, got {len(flat)}")
    try:
        entries = np.array([complex(re, im) for re, im in flat]).reshape(n, n)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    return qops.BipartiteState(entries, dimA=dim_a, dimB=dim_b)


def cmd_bound(args: argparse.Namespace) -> int:
    state = load_state_file(args.state)
    _check_d_range(2, max(state.dimA, state.dimB), _MATRIX_D_MAX)
    if state.dimA != state.dimB:
        raise ValueError("the criteria require equal local dimensions")
    d = state.dimA
    rho = criteria.normalize_bob_marginal(state)

    w_family = _family("werner", d)
    s_family = _family("isotropic", d)
    if args.n == "2":
        r2_w = radii.closed_form_r2(w_family)
        r2_s = radii.closed_form_r2(s_family)
    else:
        r2_w = radii.reference_thresholds(w_family).projective
        r2_s = radii.reference_thresholds(s_family).projective

    anchor_eta = r2_w if args.anchor == "werner" else r2_s
    anchor_state = (
        qops.werner_state(d, anchor_eta) if args.anchor == "werner" else qops.isotropic_state(d, anchor_eta)
    )
    degradation = criteria.degradation_radius(rho, anchor_state, tol=args.tol)
    upper = criteria.steerability_upper_bound(
        rho, r2_w, r2_s, iso_denominator_printed=args.iso_denominator_printed
    )
    fids = criteria.twirling_fidelities(rho)

    level = "2" if args.n == "2" else "pvm"
    if degradation.value >= 1.0 - 1e-6 and upper >= 1.0:
        verdict = f"certified-unsteerable at level {level}"
    elif upper < 1.0 and degradation.value < 1.0 - 1e-6:
        verdict = "certified-steerable"
    else:
        # Neither bound decides, or the two disagree within solver noise.
        verdict = "inconclusive"

    report = {
        "schema": BOUND_SCHEMA,
        "state": {"dimA": state.dimA, "dimB": state.dimB},
        "level": level,
        "anchor": {"family": args.anchor, "eta": anchor_eta},
        "fidelities": {"F_S": fids.f_s, "F_W": fids.f_w},
        "lower_bound": degradation.value,
        "upper_bound": None if upper == float("inf") else upper,
        "witness_residual": degradation.witness_residual,
        "solves": degradation.solves,
        "verdict": verdict,
    }
    _write_output(json.dumps(report, indent=2, sort_keys=True), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsteer",
        description="Steering critical radii of Werner and isotropic states, "
        "hidden-state models for POVMs, and steerability criteria.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_radii = sub.add_parser("radii", help="threshold table for one family")
    p_radii.add_argument("--family", choices=["werner", "isotropic"], required=True)
    p_radii.add_argument("--d-min", type=int, default=2)
    p_radii.add_argument("--d-max", type=int, default=10)
    p_radii.add_argument("--format", choices=["csv", "json"], default="csv")
    p_radii.add_argument("--out", default=None, help="write the table to a file instead of stdout")
    p_radii.add_argument("--plot", default=None, help="also render the table to this figure file")
    p_radii.set_defaults(func=cmd_radii)

    p_verify = sub.add_parser("verify", help="run the invariant self-test suite")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=100_000)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_scan = sub.add_parser("conjecture-scan", help="per-rank radii and minimizing rank")
    p_scan.add_argument("--d-max", type=int, required=True)
    p_scan.add_argument("--d-min", type=int, default=2)
    p_scan.add_argument("--family", choices=["werner", "isotropic", "both"], default="both")
    p_scan.add_argument("--format", choices=["csv", "json"], default="csv")
    p_scan.add_argument("--out", default=None)
    p_scan.add_argument("--plot", default=None)
    p_scan.set_defaults(func=cmd_conjecture_scan)

    p_bound = sub.add_parser("bound", help="certify a state from a JSON file")
    p_bound.add_argument("--state", required=True, help="path to the state JSON file")
    p_bound.add_argument("--anchor", choices=["werner", "isotropic"], required=True)
    p_bound.add_argument("--n", choices=["2", "pvm"], required=True,
                         help="measurement class: dichotomic (2) or projective (pvm)")
    p_bound.add_argument("--tol", type=float, default=1e-7, help="feasibility gap tolerance")
    p_bound.add_argument("--iso-denominator-printed", action="store_true",
                         help="use the circulated isotropic denominator d^2 - F_S - 1 "
                         "instead of the twirling-derived d^2 F_S - 1")
    p_bound.add_argument("--out", default=None)
    p_bound.set_defaults(func=cmd_bound)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverConvergenceError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
