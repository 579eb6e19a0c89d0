"""Command line entry point: ``connsep <subcommand> ...``.

Every subcommand prints a JSON report (or writes it to ``--out``).  Reports
contain no wall-clock data unless ``--timing`` is given, so identical
inputs and seeds give byte-identical output.

Exit codes: 0 success, 1 failures / violations / mismatches, 2 bad input,
3 internal soundness failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import chessboard, formats, oracle, scalar_field, synthesis
from .grid import SoundnessError, UsageError


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from exc


def _args_digest(d: dict) -> str:
    return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------------------
# subcommands; each returns (report, failed)


def cmd_witness(args):
    doc, digest = formats.read_json(args.file)
    if "sets" in doc:
        sets = formats.cover_from_dict(doc)
        w = chessboard.lebesgue_witness(sets)
        kind = "lebesgue"
    else:
        F = formats.labeling_from_dict(doc)
        w = chessboard.steinhaus_witness(F, generalized=args.generalized)
        kind = "generalized" if args.generalized else "plain"
    result = {"kind": kind, "color": w.axis, "chain": w.chain.to_dict(), "length": len(w.chain)}
    return {"inputs": {"file_sha256": digest}, "result": result}, False


def cmd_verify(args):
    inputs = {"n": args.n, "k": args.k, "mode": args.mode, "max_enum": args.max_enum}
    size = chessboard.enumeration_size(args.n, args.k, args.mode)
    if size <= args.max_enum and args.trials is None:
        rep = chessboard.exhaustive_verify(args.n, args.k, args.mode, args.max_enum, args.jobs)
    elif args.trials is not None:
        inputs.update(seed=args.seed, trials=args.trials)
        rep = chessboard.random_verify(args.n, args.k, args.mode, args.trials, args.seed)
    else:
        raise UsageError(
            f"enumeration size {size} exceeds --max-enum {args.max_enum}; "
            "pass --trials N (and --seed) for a randomized run"
        )
    inputs["digest"] = _args_digest(inputs)
    report = {"inputs": inputs, "result": rep.to_dict()}
    if args.timing:
        report["elapsed_s"] = round(rep.elapsed, 3)
    return report, rep.failures > 0


def cmd_level(args):
    doc, digest = formats.read_json(args.file)
    G = formats.integer_field_from_dict(doc)
    axes = args.axis or list(range(1, G.spec.n + 1))
    out = []
    for i in axes:
        r = chessboard.separating_level(G, i)
        entry = {"axis": i, "kind": r.kind, "level": r.level}
        if r.chain is not None:
            entry["chain"] = r.chain.to_dict()
        if r.certificate is not None:
            cert = r.certificate.to_dict()
            cert.pop("removed")
            entry["certificate"] = cert
        out.append(entry)
    return {"inputs": {"file_sha256": digest}, "result": out}, False


def cmd_analyze(args):
    doc, digest = formats.read_json(args.file)
    f = formats.scalar_field_from_dict(doc)
    schedule = args.kschedule or ([f.spec.k] if hasattr(f, "spec") else [8])
    cs = scalar_field.bracket_sets(f, args.axes, schedule, args.dp, jobs=args.jobs)
    result = cs.to_dict()
    return {"inputs": {"file_sha256": digest, "dp": args.dp, "kschedule": schedule},
            "result": result}, False


def cmd_synthesize(args):
    doc, digest = formats.read_json(args.file)
    spec = formats.connsep_spec_from_dict(doc)
    inputs = {"file_sha256": digest}
    bad = synthesis.validate_spec(spec)
    if bad is not None:
        return {"inputs": inputs, "result": {"valid": False, "violation": bad.to_dict()}}, True
    sf = synthesis.build_function(spec)
    field_doc = sf.to_dict()
    result = {"valid": True, "branch": sf.branch, "provenance": sf.provenance()}
    if args.out_field:
        Path(args.out_field).write_text(formats.dumps(field_doc))
        result["field_file"] = str(args.out_field)
    else:
        result["field"] = field_doc
    failed = False
    if args.verify_k:
        rt = synthesis.verify_round_trip(sf, tuple(args.verify_k), args.dp, jobs=args.jobs)
        result["round_trip"] = rt.to_dict()
        inputs.update(verify_k=args.verify_k, dp=args.dp)
        failed = not rt.ok
    return {"inputs": inputs, "result": result}, failed


def cmd_oracle_check(args):
    exhaustive = args.trials is None
    res = oracle.equivalence_check(args.n, args.k, exhaustive, args.trials or 0, args.seed)
    inputs = {"n": args.n, "k": args.k, "trials": args.trials, "seed": args.seed}
    inputs["digest"] = _args_digest(inputs)
    return {"inputs": inputs, "result": res}, res["mismatches"] > 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="connsep", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include elapsed seconds")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("witness", help="monochromatic chain of a labeling or cover")
    s.add_argument("file")
    s.add_argument("--generalized", action="store_true", help="colour i needs (i-1)-dim links")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("verify", help="check the chessboard theorems on all or random instances")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=chessboard.MODES, default="plain")
    s.add_argument("--max-enum", type=int, default=chessboard.DEFAULT_MAX_ENUM)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("level", help="connecting or separating level of an integer field")
    s.add_argument("file")
    s.add_argument("--axis", type=int, action="append")
    s.set_defaults(func=cmd_level)

    s = sub.add_parser("analyze", help="certified Conn/Sep level brackets of a scalar field")
    s.add_argument("file")
    s.add_argument("--axes", type=_int_list)
    s.add_argument("--kschedule", type=_int_list)
    s.add_argument("--dp", type=float, default=0.01)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synthesize", help="build a field with prescribed Conn/Sep sets")
    s.add_argument("file")
    s.add_argument("--out", dest="out_field", help="write the field file here")
    s.add_argument("--verify-k", type=_int_list, help="round-trip grid schedule, e.g. 16,32,64")
    s.add_argument("--dp", type=float, default=0.01)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("oracle-check", help="compare the engine with the face-lattice oracle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", default=True)
    g.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    code = 0
    try:
        report, failed = args.func(args)
        report = {"command": args.command, "status": "fail" if failed else "ok", **report}
        code = 1 if failed else 0
    except UsageError as exc:
        report = {"command": args.command, "status": "error", "error": str(exc)}
        code = 2
    except FileNotFoundError as exc:
        report = {"command": args.command, "status": "error", "error": f"file not found: {exc.filename}"}
        code = 2
    except SoundnessError as exc:
        report = {"command": args.command, "status": "soundness-failure", "error": str(exc),
                  "details": exc.details}
        code = 3
    if args.timing and "elapsed_s" not in report:
        report["elapsed_s"] = round(time.perf_counter() - t0, 3)
    text = formats.dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if code == 2:
        print(f"connsep {args.command}: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
