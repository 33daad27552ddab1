"""Command-line entry point: ``concatft codes|check|gadget|verify``."""

from __future__ import annotations

import argparse
import json
import sys

from .codes import BudgetExceeded, ConcatLayout, CssCode, build_rm15, build_steane, concatenate, distance_xz, validate
from .transversal import is_transversal

EXIT_OK, EXIT_USAGE, EXIT_REFUSED, EXIT_UNEXPECTED = 0, 2, 3, 4

CODES = ("steane", "rm15", "concat")
GATES = ("X", "Y", "Z", "S", "T", "H", "CNOT")
VERIFY_GATES = ("T", "H", "CNOT", "S", "EC")

# Expected transversality of each gate (True = realised transversally).
EXPECTED_TRANSVERSAL = {
    "steane": {"X": True, "Y": True, "Z": True, "S": True, "H": True, "CNOT": True, "T": False},
    "rm15": {"X": True, "Y": True, "Z": True, "S": True, "T": True, "CNOT": True, "H": False},
}


def _layout() -> ConcatLayout:
    return concatenate(build_steane(), build_rm15())


def _code(name: str) -> CssCode:
    return {"steane": build_steane, "rm15": build_rm15}[name]()


def _describe(c: CssCode) -> dict:
    dx, dz = distance_xz(c)
    return {
        "name": c.name,
        "label": c.label(min(dx, dz)),
        "n": c.n,
        "k": c.k,
        "dx": dx,
        "dz": dz,
        "generators": c.generator_count,
        "hx": c.hx.to_strings(),
        "hz": c.hz.to_strings(),
        "lx": [v.to_string() for v in c.lx],
        "lz": [v.to_string() for v in c.lz],
        "violations": validate(c),
    }


def _describe_concat() -> dict:
    from .codes import commutes_with_all, distance9_witness
    from .algebra import pauli_commutes

    layout = _layout()
    flat = layout.code
    w = distance9_witness(layout)
    return {
        "name": "concat",
        "label": f"[[{layout.n},{layout.k},<=9]]",
        "n": layout.n,
        "k": layout.k,
        "blocks": layout.block_count,
        "generators": len(layout.lifted_stabilizers()),
        "independent_x_checks": flat.hx.nrows,
        "independent_z_checks": flat.hz.nrows,
        "distance_upper_bound": w.weight,
        "witness": w.sparse(),
        "witness_commutes_with_stabilizers": commutes_with_all(w, layout.lifted_stabilizers()),
        "witness_anticommutes_with_partner": bool(pauli_commutes(w, layout.logical_x())),
        "violations": validate(flat),
    }


def cmd_codes(args) -> int:
    info = _describe_concat() if args.name == "concat" else _describe(_code(args.name))
    if args.json:
        print(json.dumps(info, indent=2))
        return EXIT_OK
    print(f"{info['name']} {info['label']}")
    print(f"n={info['n']} k={info['k']}")
    for key, val in info.items():
        if key in ("name", "label", "n", "k"):
            continue
        if isinstance(val, list) and not val:
            print(f"{key}: none")
        elif isinstance(val, list):
            print(f"{key}:")
            for row in val:
                print(f"  {row}")
        else:
            print(f"{key}: {val}")
    return EXIT_OK


def cmd_check(args) -> int:
    c = _code(args.code)
    from .oracle import oracle_transversal

    comb = is_transversal(c, args.gate)
    orc = oracle_transversal(c, args.gate)
    expected = EXPECTED_TRANSVERSAL[args.code][args.gate]
    ok = comb == orc == expected
    out = {"code": args.code, "gate": args.gate, "combinatorial": comb, "oracle": orc,
           "expected": expected, "match": ok}
    print(json.dumps(out, indent=2))
    return EXIT_OK if ok else EXIT_UNEXPECTED


def cmd_gadget(args) -> int:
    from .gadgets import GADGET_BUILDERS, build_exrec

    g = GADGET_BUILDERS[args.gate](_layout())
    text = build_exrec(g).to_text() if args.exrec else g.to_text()
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .gadgets import GADGET_BUILDERS, build_exrec
    from .verify import run_block_error_campaign, run_single_fault_campaign, search_double_fault_counterexample

    exrec = build_exrec(GADGET_BUILDERS[args.gate](_layout()))
    if args.faults == 1:
        if exrec.fault_model == "block":
            report = run_block_error_campaign(exrec, jobs=args.jobs)
        else:
            report = run_single_fault_campaign(exrec, jobs=args.jobs)
        code = EXIT_OK if not report.failures else EXIT_UNEXPECTED
    else:
        report = search_double_fault_counterexample(exrec, budget=args.budget, jobs=args.jobs)
        code = EXIT_OK if report.status == "witness" else EXIT_REFUSED
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{report.gadget}: {report.status} cases={report.cases} failures={len(report.failures)} "
          f"time={report.wall_clock:.2f}s", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concatft", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    codes = sub.add_parser("codes", help="show a code")
    codes_sub = codes.add_subparsers(dest="action", required=True)
    show = codes_sub.add_parser("show")
    show.add_argument("name", choices=CODES)
    show.add_argument("--json", action="store_true")
    show.set_defaults(func=cmd_codes)

    check = sub.add_parser("check", help="transversality checks with oracle cross-check")
    check_sub = check.add_subparsers(dest="what", required=True)
    tr = check_sub.add_parser("transversal")
    tr.add_argument("--code", choices=("steane", "rm15"), required=True)
    tr.add_argument("--gate", choices=GATES, required=True)
    tr.set_defaults(func=cmd_check)

    gad = sub.add_parser("gadget", help="print a gadget in circuit text form")
    gad.add_argument("gate", choices=VERIFY_GATES)
    gad.add_argument("--exrec", action="store_true", help="include the EC schedule")
    gad.set_defaults(func=cmd_gadget)

    ver = sub.add_parser("verify", help="run a fault campaign")
    ver.add_argument("--gate", choices=VERIFY_GATES, required=True)
    ver.add_argument("--faults", type=int, choices=(1, 2), default=1)
    ver.add_argument("--budget", type=int, default=10_000_000)
    ver.add_argument("--jobs", type=int, default=1)
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", 0) < 0 or getattr(args, "jobs", 1) < 1:
        print("error: --budget must be >= 0 and --jobs >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except Exception as exc:  # noqa: BLE001 - surfaced as an exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
