"""Command line front door.

Commands mirror the package layers: contract / contract-sym run one
contraction over edge files or formula files, winnow and skyline work
on CSV datasets, serve starts the HTTP session service, bench times
prefix against meet contraction on generated relations.

Engine failures print one JSON object on standard error; protection
conflicts exit with status 2 so scripts can branch on them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .contract import (
    check_finitely_stratifiable,
    meet_contr,
    meet_contr_protecting,
    meet_contr_symbolic,
    min_contr_finite,
    min_contr_protecting,
    min_contr_protecting_symbolic,
    min_contr_symbolic,
)
from .contract.finite import MEET, PREFIX, PROTECTING, PROTECTING_MEET
from .errors import PrefconError, ValidationError
from .formula import Schema, and_not, parse_formula, to_source
from .relation import dump_edges, load_edges
from .service import create_app, json_safe
from .winnow import dump_dataset, load_dataset, skyline_relation, winnow

MODES = ("prefix", "meet", "protecting", "protecting-meet")


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _mode_args(mode: str, protect) -> None:
    if mode in ("protecting", "protecting-meet"):
        if protect is None:
            raise ValidationError(f"mode {mode} needs --protect")
    elif protect is not None:
        raise ValidationError(f"mode {mode} does not take --protect")


def cmd_contract(args) -> int:
    pref = load_edges(args.pref)
    con = load_edges(args.con)
    protect = load_edges(args.protect) if args.protect else None
    _mode_args(args.mode, protect)
    if args.mode == "prefix":
        res = min_contr_finite(pref, con)
    elif args.mode == "protecting":
        res = min_contr_protecting(pref, con, protect)
    elif args.mode == "meet":
        res = meet_contr(pref, con)
    else:
        res = meet_contr_protecting(pref, con, protect)
    dump_edges(res.contractor, args.out)
    doc = {
        "mode": res.mode,
        "pref_edges": len(pref),
        "contractor_edges": len(res.contractor),
        "contracted_edges": len(res.contracted),
        "out": str(args.out),
    }
    if res.forced is not None:
        doc["forced"] = [list(e) for e in res.forced.sorted_edges()]
    if res.protected is not None:
        doc["protected_edges"] = len(res.protected)
    if args.trace:
        doc["trace"] = [
            {"stratum": i, "added": [list(e) for e in rel.sorted_edges()]}
            for i, rel in res.strata_trace
        ]
    _emit(doc)
    return 0


def _read_formula(schema: Schema, path: str):
    return parse_formula(schema, Path(path).read_text(encoding="utf-8").strip())


def cmd_contract_sym(args) -> int:
    schema = Schema.load(args.schema)
    pref = _read_formula(schema, args.pref)
    con = _read_formula(schema, args.con)
    protect = _read_formula(schema, args.protect) if args.protect else None
    _mode_args(args.mode, protect)
    if args.check_only:
        report = check_finitely_stratifiable(pref, con)
        _emit(
            {
                "stratifiable": report.stratifiable,
                "failing_disjunct": report.failing_disjunct,
                "failing_reason": json_safe(report.failing_reason),
                "pref_con": to_source(report.pref_con),
                "k_con": to_source(report.k_con),
            }
        )
        return 0
    if args.mode == "prefix":
        res = min_contr_symbolic(pref, con)
    elif args.mode == "protecting":
        res = min_contr_protecting_symbolic(pref, con, protect)
    else:
        contractor = meet_contr_symbolic(pref, con, protect)
        doc = {
            "mode": MEET if args.mode == "meet" else PROTECTING_MEET,
            "contractor": to_source(contractor),
            "contracted": to_source(and_not(pref, contractor)),
        }
        _emit(doc)
        return 0
    doc = {
        "mode": res.mode,
        "strata": len(res.strata_trace),
        "contractor": to_source(res.contractor),
        "contracted": to_source(res.contracted),
    }
    if res.forced is not None:
        doc["forced"] = to_source(res.forced)
    if res.protected is not None:
        doc["protected"] = to_source(res.protected)
    _emit(doc)
    return 0


def _parse_spec(text: str) -> dict:
    spec = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValidationError(f"bad spec entry {part!r}; want attr=min|max|ignore")
        attr, _, direction = part.partition("=")
        spec[attr.strip()] = direction.strip()
    if not spec:
        raise ValidationError("empty skyline spec")
    return spec


def cmd_winnow(args) -> int:
    schema = Schema.load(args.schema)
    data = load_dataset(args.data, schema)
    given = [x for x in (args.pref, args.formula, args.spec) if x]
    if len(given) != 1:
        raise ValidationError("give exactly one of --pref, --formula, --spec")
    if args.pref:
        source = load_edges(args.pref)
    elif args.formula:
        source = parse_formula(schema, args.formula)
    else:
        source = skyline_relation(data, _parse_spec(args.spec))
    result = winnow(source, data)
    if args.out:
        if args.annotate:
            dump_dataset(data, args.out, mark=result.keys())
        else:
            dump_dataset(result, args.out)
    _emit({"keys": list(result.keys()), "rows": len(data), "kept": len(result)})
    return 0


def cmd_skyline(args) -> int:
    schema = Schema.load(args.schema)
    data = load_dataset(args.data, schema)
    rel = skyline_relation(data, _parse_spec(args.spec))
    dump_edges(rel, args.out)
    _emit({"edges": len(rel), "out": str(args.out)})
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    data_dir = args.data or os.environ.get("PREFCON_DATA") or "./prefcon-data"
    if args.ui is not None and not Path(args.ui).is_dir():
        raise ValidationError(f"--ui directory not found: {args.ui}")
    app = create_app(data_dir, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_bench(args) -> int:
    out = bench_mod.run_bench(
        trials=args.trials,
        seed=args.seed,
        target_edges=args.edges,
        max_con=args.max_con,
    )
    for trial in out["trials"]:
        print(json.dumps(trial, sort_keys=True))
    print(json.dumps({"all_ok": out["all_ok"]}))
    return 0 if out["all_ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefcon", description="preference contraction toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("contract", help="contract a finite relation from edge files")
    p.add_argument("--pref", required=True)
    p.add_argument("--con", required=True)
    p.add_argument("--protect")
    p.add_argument("--mode", choices=MODES, default="prefix")
    p.add_argument("--trace", action="store_true", help="include per-stratum additions")
    p.add_argument("--out", required=True, help="edge file for the contractor")
    p.set_defaults(fn=cmd_contract)

    p = sub.add_parser("contract-sym", help="contract a formula-defined relation")
    p.add_argument("--schema", required=True, help="schema JSON file")
    p.add_argument("--pref", required=True, help="formula file")
    p.add_argument("--con", required=True, help="formula file")
    p.add_argument("--protect", help="formula file")
    p.add_argument("--mode", choices=MODES, default="prefix")
    p.add_argument(
        "--check-only",
        action="store_true",
        help="report finite stratifiability instead of contracting",
    )
    p.set_defaults(fn=cmd_contract_sym)

    p = sub.add_parser("winnow", help="undominated rows of a CSV dataset")
    p.add_argument("--data", required=True, help="CSV file, key column first")
    p.add_argument("--schema", required=True)
    p.add_argument("--pref", help="edge file over row keys")
    p.add_argument("--formula", help="formula text")
    p.add_argument("--spec", help="skyline spec, e.g. price=min,year=max")
    p.add_argument("--annotate", action="store_true",
                   help="write all rows with a winnow_rank column")
    p.add_argument("--out", help="CSV output file")
    p.set_defaults(fn=cmd_winnow)

    p = sub.add_parser("skyline", help="materialize a Pareto dominance relation")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_skyline)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", help="data directory (default $PREFCON_DATA or ./prefcon-data)")
    p.add_argument("--ui", help="also serve a static frontend directory at /")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("bench", help="time prefix vs meet contraction")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges", type=int, default=2000)
    p.add_argument("--max-con", type=int, default=35)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PrefconError as exc:
        doc = {"code": exc.code, "message": str(exc), "details": json_safe(exc.details)}
        print(json.dumps(doc, sort_keys=True), file=sys.stderr)
        return 2 if exc.code == "PROTECTION_CONFLICT" else 1
    except OSError as exc:
        print(json.dumps({"code": "IO_ERROR", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
