"""Command-line front door: reproducible verification runs with
machine-readable reports.

Exit codes: 0 all requested checks passed, 2 some check failed (or the
computation tripped the bit-size guard), 3 invalid parameters or usage.
All rationals cross the CLI boundary as "num/den" strings.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .diffop import adjoint, named_basis, relation_suite, symmetry_check
from .dwsolve import filtration_report, kpr_crosscheck
from .exactcore import BitBudgetExceeded, format_rational, refresh_bit_limit
from .families import FamilyCache, family_records, verify_family
from .weight import ParameterError, Params, conjugation_check, reduction_check

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_BAD_PARAMS = 3

SWEEP_GRID = (
    ("1/1", "3/1"),
    ("1/1", "4/1"),
    ("2/1", "5/1"),
    ("3/2", "7/2"),
    ("5/2", "6/1"),
    ("1/1", "2/1"),
)

W_MAX_CAP = 24
S_MAX_CAP = 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_BAD_PARAMS)


def _parse_params(p_text: str, n_text: str) -> Params:
    try:
        return Params(Fraction(p_text), Fraction(n_text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(str(exc)) from exc


def run_family(p_text: str, n_text: str, w_max: int) -> dict:
    params = _parse_params(p_text, n_text)
    if not 0 <= w_max <= W_MAX_CAP:
        raise ParameterError(f"w_max must lie in [0, {W_MAX_CAP}]")
    cache = FamilyCache(params)
    verification = verify_family(w_max, params, cache)
    reduction = reduction_check(cache.weight)
    report = {
        "command": "family",
        "params": params.to_json(),
        "weight": cache.weight.to_json(),
        "reducible": params.reducible,
        "reduction": reduction.to_json(),
        "conjugation_swaps_parameters": conjugation_check(params.p, params.n),
        "family": family_records(w_max, params, cache),
        "verification": verification.to_json(),
        "warnings": (
            ["weight is reducible at n = 2p; irreducibility claims do not apply"]
            if params.reducible
            else []
        ),
        "passed": verification.passed,
    }
    return report


def run_algebra(p_text: str, n_text: str) -> dict:
    params = _parse_params(p_text, n_text)
    cache = FamilyCache(params)
    basis = named_basis(params)
    relations = relation_suite(params, basis)

    p, n = params.p, params.n
    adjoint_table = []
    expected = [
        ("d1", basis.d1, "d1", basis.d1),
        ("d2", basis.d2, "d2", basis.d2),
        ("d3", basis.d3, "(p/(n-p)) d4", basis.d4 * (p / (n - p))),
        ("d4", basis.d4, "((n-p)/p) d3", basis.d3 * ((n - p) / p)),
        ("e3", basis.e3, "e3", basis.e3),
        ("e4_over_i", basis.e4_over_i, "-e4_over_i", -basis.e4_over_i),
        ("identity", basis.identity, "identity", basis.identity),
    ]
    adjoints_ok = True
    for name, op, expected_name, expected_op in expected:
        holds = adjoint(op, cache) == expected_op
        adjoints_ok = adjoints_ok and holds
        adjoint_table.append({"op": name, "adjoint": expected_name, "holds": holds})

    symmetry_expected = {
        "hypergeom": (basis.hypergeom, True),
        "d1": (basis.d1, True),
        "d2": (basis.d2, True),
        "d3": (basis.d3, False),
        "d4": (basis.d4, False),
        "e3": (basis.e3, True),
        "identity": (basis.identity, True),
    }
    symmetry_table = []
    symmetry_ok = True
    for name, (op, want) in symmetry_expected.items():
        got = symmetry_check(op, cache.weight).symmetric
        symmetry_ok = symmetry_ok and (got is want)
        symmetry_table.append({"op": name, "symmetric": got, "expected": want})

    passed = relations.passed and adjoints_ok and symmetry_ok
    return {
        "command": "algebra",
        "params": params.to_json(),
        "relations": relations.to_json(),
        "adjoints": adjoint_table,
        "adjoints_ok": adjoints_ok,
        "symmetry": symmetry_table,
        "symmetry_ok": symmetry_ok,
        "passed": passed,
    }


def run_dw(p_text: str, n_text: str, s_max: int, with_kpr: bool) -> dict:
    params = _parse_params(p_text, n_text)
    if not 0 <= s_max <= S_MAX_CAP:
        raise ParameterError(f"s_max must lie in [0, {S_MAX_CAP}]")
    filtration = filtration_report(s_max, params)
    passed = filtration.passed
    report = {
        "command": "dw",
        "params": params.to_json(),
        "filtration": filtration.to_json(),
    }
    if with_kpr:
        kpr = kpr_crosscheck()
        report["kpr"] = kpr.to_json()
        passed = passed and kpr.passed
    report["passed"] = passed
    return report


def _sweep_worker(job) -> dict:
    command, p_text, n_text, w_max, s_max, with_kpr = job
    if command == "family":
        return run_family(p_text, n_text, w_max)
    if command == "algebra":
        return run_algebra(p_text, n_text)
    return run_dw(p_text, n_text, s_max, with_kpr)


def run_sweep(command: str, w_max: int, s_max: int, with_kpr: bool) -> dict:
    """Run one command over the built-in parameter grid, concurrently but
    assembled in grid order."""
    jobs = [(command, p, n, w_max, s_max, with_kpr) for p, n in SWEEP_GRID]
    try:
        with ProcessPoolExecutor(max_workers=min(len(jobs), 4)) as pool:
            entries = list(pool.map(_sweep_worker, jobs))
    except Exception:
        entries = [_sweep_worker(job) for job in jobs]
    return {
        "command": command,
        "sweep": True,
        "grid": [{"p": p, "n": n} for p, n in SWEEP_GRID],
        "entries": entries,
        "passed": all(e["passed"] for e in entries),
    }


# -- rendering ----------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _family_csv(report: dict, writer) -> None:
    header = ["w"]
    for mat in ("gram", "A", "B", "C", "A_monic", "B_monic"):
        for i in (1, 2):
            for j in (1, 2):
                header.append(f"{mat}_{i}{j}")
    writer.writerow(header)
    for rec in report["family"]:
        row = [rec["w"]]
        gram = rec["gram_diag"]
        gram_full = [[gram[0], "0/1"], ["0/1", gram[1]]]
        mats = [gram_full] + [rec["recursion"][k] for k in ("A", "B", "C", "A_monic", "B_monic")]
        for mat in mats:
            for i in (0, 1):
                for j in (0, 1):
                    row.append(mat[i][j])
        writer.writerow(row)


def _algebra_csv(report: dict, writer) -> None:
    writer.writerow(["kind", "name", "value"])
    for rel in report["relations"]["relations"]:
        writer.writerow(["relation", rel["name"], rel["holds"]])
    writer.writerow(["relation", "noncommutative", report["relations"]["noncommutative"]])
    for row in report["adjoints"]:
        writer.writerow(["adjoint", f"{row['op']}* = {row['adjoint']}", row["holds"]])
    for row in report["symmetry"]:
        writer.writerow(["symmetry", row["op"], row["symmetric"]])


def _dw_csv(report: dict, writer) -> None:
    writer.writerow(["order", "dim", "new_dim"])
    for stratum in report["filtration"]["strata"]:
        writer.writerow([stratum["order"], stratum["dim"], stratum["new_dim"]])


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    entries = report["entries"] if report.get("sweep") else [report]
    for entry in entries:
        if report.get("sweep"):
            writer.writerow([f"# p={entry['params']['p']} n={entry['params']['n']}"])
        if entry["command"] == "family":
            _family_csv(entry, writer)
        elif entry["command"] == "algebra":
            _algebra_csv(entry, writer)
        else:
            _dw_csv(entry, writer)
    writer.writerow(["passed", report["passed"]])
    return buf.getvalue()


def _summary_lines(entry: dict) -> list[str]:
    lines = []
    label = f"p={entry['params']['p']} n={entry['params']['n']}"
    if entry["command"] == "family":
        v = entry["verification"]
        lines.append(f"[family {label}] w_max={v['w_max']}")
        for key in (
            "orthogonality_ok",
            "gram_diagonal_ok",
            "leading_ok",
            "p_recursion_ok",
            "monic_recursion_ok",
            "eigenfunction_ok",
        ):
            lines.append(f"  {key}: {v[key]}")
        lines.append(f"  norm certified checks: {v['norm']['passed']}")
        lines.append(
            f"  norm prefactor profile matches reference: "
            f"{v['norm']['profile_matches_reference']}"
        )
        lines.append(f"  reference table: {v['reference_table']['passed']}")
        seen_kinds: dict[str, int] = {}
        notes: dict[str, str] = {}
        for err in v["errata"]:
            seen_kinds[err["kind"]] = seen_kinds.get(err["kind"], 0) + 1
            notes[err["kind"]] = err["note"]
        for kind, count in seen_kinds.items():
            suffix = f" ({count} instances)" if count > 1 else ""
            lines.append(f"  erratum [{kind}]{suffix}: {notes[kind]}")
        for warning in entry["warnings"]:
            lines.append(f"  warning: {warning}")
    elif entry["command"] == "algebra":
        lines.append(f"[algebra {label}]")
        for rel in entry["relations"]["relations"]:
            lines.append(f"  {rel['name']}: {'ok' if rel['holds'] else 'FAIL'}")
        lines.append(f"  noncommutative: {entry['relations']['noncommutative']}")
        for row in entry["adjoints"]:
            lines.append(
                f"  {row['op']}* = {row['adjoint']}: {'ok' if row['holds'] else 'FAIL'}"
            )
        for row in entry["symmetry"]:
            mark = "ok" if row["symmetric"] is row["expected"] else "UNEXPECTED"
            lines.append(f"  symmetric({row['op']}) = {row['symmetric']} [{mark}]")
    else:
        lines.append(f"[dw {label}]")
        lines.append(f"  new dims by order: {entry['filtration']['new_dims']}")
        if entry["filtration"]["order2_ok"] is not None:
            lines.append(f"  order<=2 classification: {entry['filtration']['order2_ok']}")
            lines.append(f"  named basis spans order<=2: {entry['filtration']['order2_span_ok']}")
        if entry["filtration"]["order4_expressible"] is not None:
            lines.append(
                f"  order-4 members are words in the generators: "
                f"{entry['filtration']['order4_expressible']}"
            )
        if "kpr" in entry:
            k = entry["kpr"]
            lines.append(f"  external cross-check passed: {k['passed']}")
            lines.append(f"  printed block matched exactly: {k['display_match']}")
            for err in k["errata"]:
                lines.append(f"  erratum [{err['kind']}]: {err['note']}")
    lines.append(f"  passed: {entry['passed']}")
    return lines


def render_pretty(report: dict) -> str:
    entries = report["entries"] if report.get("sweep") else [report]
    lines: list[str] = []
    for entry in entries:
        lines.extend(_summary_lines(entry))
    lines.append(f"overall: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "pretty": render_pretty}


def build_parser() -> _Parser:
    parser = _Parser(prog="mvop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--p", default="1/1", help='parameter p as "num/den"')
        sp.add_argument("--n", default="3/1", help='parameter n as "num/den"')
        sp.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
        sp.add_argument("--out", default=None, help="write the report to a file")
        sp.add_argument(
            "--seed-sweep",
            action="store_true",
            help="run over the built-in parameter grid instead of a single point",
        )

    family = sub.add_parser("family", help="family construction and recursion checks")
    add_common(family)
    family.add_argument("--w-max", type=int, default=10)

    algebra = sub.add_parser("algebra", help="operator relations, adjoints, symmetry")
    add_common(algebra)

    dw = sub.add_parser("dw", help="order filtration of the operator algebra")
    add_common(dw)
    dw.add_argument("--s-max", type=int, default=2)
    dw.add_argument("--kpr", action="store_true", help="include the external cross-check")
    return parser


def main(argv=None) -> int:
    refresh_bit_limit()
    parser = build_parser()
    args = parser.parse_args(argv)
    w_max = getattr(args, "w_max", 10)
    s_max = getattr(args, "s_max", 2)
    with_kpr = getattr(args, "kpr", False)
    try:
        if args.seed_sweep:
            report = run_sweep(args.command, w_max, s_max, with_kpr)
        elif args.command == "family":
            report = run_family(args.p, args.n, w_max)
        elif args.command == "algebra":
            report = run_algebra(args.p, args.n)
        else:
            report = run_dw(args.p, args.n, s_max, with_kpr)
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except BitBudgetExceeded as exc:
        print(f"computation aborted: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    text = RENDERERS[args.format](report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
