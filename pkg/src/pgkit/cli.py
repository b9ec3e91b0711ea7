"""Command-line interface.

Document-producing commands (``pg``, ``truncate``, ``project``) write a
canonical construction document; the others read one (``-`` or no FILE means
stdin) and print a result as JSON or as a short table. Exit status: 0 on
success, 1 on a failing verification or an analysis error, 2 on a malformed
invocation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis as an
from . import harness
from .errors import PgkitError
from .field import field_of_order
from .matroid import DEFAULT_FLAT_CAP, Matroid, elements_of, flat_masks_by_rank, point_masks
from .roundness import weakly_round
from .serialize import ConstructionDocument, canonical_bytes, parse, pg_document, replay, serialize


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    """Parse ``1,2,3`` (spaces allowed, empty means the empty set)."""
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS, help="output format (default: table)")
    p.add_argument("--out", metavar="PATH", default=argparse.SUPPRESS, help="write output to PATH instead of stdout")
    p.add_argument("--cap-flats", metavar="N", type=int, default=argparse.SUPPRESS, help="cap on flats enumerated by searches")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pgkit", description="Matroids over finite fields: constructions, densities and structural checks.", parents=[common])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=help_text, parents=[common])

    def file_arg(p):
        p.add_argument("file", nargs="?", default="-", metavar="FILE", help="construction document ('-' for stdin)")

    p = add("pg", "emit the document of PG(n-1, q)")
    p.add_argument("-q", type=int, required=True)
    p.add_argument("-n", type=int, required=True, help="rank")

    p = add("truncate", "append k truncations to a document")
    p.add_argument("-k", type=int, required=True)
    file_arg(p)

    p = add("project", "extend freely on each flat in turn, then contract the new elements")
    p.add_argument("--flat", type=_int_list, action="append", required=True, metavar="E1,E2,...", help="flat of the current matroid (repeatable)")
    file_arg(p)

    p = add("eps", "number of points")
    file_arg(p)

    p = add("rank", "rank of a set (default: the ground set)")
    p.add_argument("--set", type=_int_list, default=None, metavar="E1,E2,...")
    file_arg(p)

    p = add("flats", "all flats of rank k")
    p.add_argument("-k", type=int, required=True)
    file_arg(p)

    p = add("check-line-minor", "search for a U_{2,m}-minor")
    p.add_argument("-m", type=int, required=True)
    file_arg(p)

    p = add("fullness", "compare eps with the (q,k) threshold")
    p.add_argument("-q", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    file_arg(p)

    p = add("weakly-round", "search for a cover by a rank-(r-2) set and a hyperplane")
    file_arg(p)

    p = add("critical", "(q,k)-critical elements of an overfull matroid")
    p.add_argument("-q", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    file_arg(p)

    p = add("verify", "run a named verification suite")
    p.add_argument("suite", choices=harness.suite_names(), metavar="SUITE", help=", ".join(harness.suite_names()))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--big", action="store_true", help="use the larger configuration")
    p.add_argument("--config", type=json.loads, default=None, metavar="JSON", help="overrides for the suite config")

    p = add("atlas", "observed d values of k-element projections")
    p.add_argument("-q", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)

    p = add("growth-table", "growth-rate formulas with measured truncation densities")
    p.add_argument("-q", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-n", type=int, required=True, help="largest rank")
    return parser


# -- I/O helpers ------------------------------------------------------------------------


def _read_doc(path: str, stdin) -> ConstructionDocument:
    if path == "-":
        data = stdin.buffer.read() if hasattr(stdin, "buffer") else stdin.read()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return parse(data)


def _load(path: str, stdin) -> tuple[ConstructionDocument, Matroid]:
    doc = _read_doc(path, stdin)
    return doc, replay(doc)


def _table(obj) -> str:
    if isinstance(obj, dict):
        width = max((len(k) for k in obj), default=0)
        lines = []
        for key, value in obj.items():
            text = value if isinstance(value, str) else json.dumps(value, sort_keys=True, separators=(",", ":"))
            lines.append(f"{key.ljust(width)}  {text}")
        return "\n".join(lines) + "\n"
    return f"{obj}\n"


# -- commands -----------------------------------------------------------------------------


def _cmd_pg(args, stdin):
    return serialize(pg_document(field_of_order(args.q), args.n)), 0


def _cmd_truncate(args, stdin):
    if args.k < 0:
        raise UsageError("-k must be >= 0")
    doc = _read_doc(args.file, stdin).with_ops(*[("truncate", None)] * args.k)
    replay(doc)
    return serialize(doc), 0


def _cmd_project(args, stdin):
    doc, M = _load(args.file, stdin)
    added = []
    for flat in args.flat:
        doc = doc.with_ops(("extend", tuple(sorted(flat))))
        before = set(M.ground)
        M = replay(doc)
        added.extend(x for x in M.ground if x not in before)
    doc = doc.with_ops(("contract", tuple(added)))
    replay(doc)
    return serialize(doc), 0


def _cmd_eps(args, stdin):
    _, M = _load(args.file, stdin)
    eps = len(point_masks(M))
    return ({"eps": eps} if args.format == "json" else eps), 0


def _cmd_rank(args, stdin):
    _, M = _load(args.file, stdin)
    X = M.ground if args.set is None else args.set
    r = M.rank(X)
    return ({"set": sorted(X), "rank": r} if args.format == "json" else r), 0


def _cmd_flats(args, stdin):
    _, M = _load(args.file, stdin)
    if not 0 <= args.k <= M.r:
        raise UsageError(f"-k must lie in 0..{M.r}")
    flats = [elements_of(F) for F in flat_masks_by_rank(M, args.k, args.cap_flats)[args.k]]
    if args.format == "json":
        return {"k": args.k, "count": len(flats), "flats": flats}, 0
    return "\n".join(" ".join(map(str, f)) for f in flats) + f"\n# {len(flats)} flats of rank {args.k}", 0


def _cmd_line_minor(args, stdin):
    _, M = _load(args.file, stdin)
    v = an.line_minor(M, args.m, cap=args.cap_flats)
    return {"m": args.m, **v.to_json()}, 0


def _cmd_fullness(args, stdin):
    _, M = _load(args.file, stdin)
    params = an.FullnessParams(args.q, args.k)
    status = an.fullness(M, params)
    return {"eps": len(point_masks(M)), "rank": M.r, "threshold": params.threshold(M.r), "status": status.value}, 0


def _cmd_weakly_round(args, stdin):
    _, M = _load(args.file, stdin)
    v = weakly_round(M, cap=args.cap_flats)
    return {"weakly_round": v.kind != "refuted", **v.to_json()}, 0


def _cmd_critical(args, stdin):
    _, M = _load(args.file, stdin)
    return {"critical": an.critical_elements(M, an.FullnessParams(args.q, args.k))}, 0


def _cmd_verify(args, stdin):
    report = harness.run_suite(args.suite, seed=args.seed, config=args.config, big=args.big)
    out = report.to_json() if args.format == "json" else report.to_text()
    return out, report.exit_code


def _cmd_atlas(args, stdin):
    entries = harness.projection_atlas(args.q, args.k, args.budget, seed=args.seed)
    if args.format == "json":
        return {"q": args.q, "k": args.k, "entries": [e.to_json() for e in entries]}, 0
    lines = [f"d={e.d}  eps_del={e.eps_del}  eps_con={e.eps_con}" for e in entries]
    lines.append(f"# {len(entries)} distinct d values observed; unobserved values are not excluded")
    return "\n".join(lines), 0


def _cmd_growth_table(args, stdin):
    rows = harness.growth_table(args.q, args.k, args.n)
    if args.format == "json":
        return {"q": args.q, "k": args.k, "rows": rows}, 0
    cols = ["n", "formula", "truncation", "gap", "measured"]
    out = ["  ".join(c.rjust(10) for c in cols)]
    for row in rows:
        out.append("  ".join(str(row.get(c, "-")).rjust(10) for c in cols))
    return "\n".join(out), 0


COMMANDS = {
    "pg": _cmd_pg,
    "truncate": _cmd_truncate,
    "project": _cmd_project,
    "eps": _cmd_eps,
    "rank": _cmd_rank,
    "flats": _cmd_flats,
    "check-line-minor": _cmd_line_minor,
    "fullness": _cmd_fullness,
    "weakly-round": _cmd_weakly_round,
    "critical": _cmd_critical,
    "verify": _cmd_verify,
    "atlas": _cmd_atlas,
    "growth-table": _cmd_growth_table,
}


def _render(result, fmt: str) -> bytes:
    if isinstance(result, bytes):
        return result
    if isinstance(result, str):
        return (result if result.endswith("\n") else result + "\n").encode()
    if fmt == "json":
        return canonical_bytes(result)
    return _table(result).encode()


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.format = getattr(args, "format", "table")
    args.cap_flats = getattr(args, "cap_flats", DEFAULT_FLAT_CAP)
    try:
        result, code = COMMANDS[args.command](args, stdin)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"pgkit: error: {exc}", file=stderr)
        return 2
    except (PgkitError, OSError, ValueError) as exc:
        print(f"pgkit: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    data = _render(result, args.format)
    if hasattr(args, "out"):
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        buf = getattr(stdout, "buffer", None)
        if buf is not None:
            buf.write(data)
            buf.flush()
        else:
            stdout.write(data.decode())
    return code


__all__ = ["build_parser", "main"]
