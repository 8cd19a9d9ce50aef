"""``seuguard`` command line.

Exit codes: 0 success, 1 usage error, 2 parse/property error, 3 some verdict
Unknown, 4 checker/oracle disagreement in differential mode.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .cfg import build_cfg, build_pdg, to_dot
from .checker import CheckerError
from .domain import DomainError, InputDomain, parse_assignment, parse_range
from .instrument import emit, self_compose
from .lang import ParseError, parse
from .pipeline import ConfigError, AnalysisConfig, analyze, load_manifest, load_property
from .prop import PropertyError
from .report import FORMATS, emit_report, summary_table
from .slicer import render_slice, slice_program
from .verdict import FIRST_USE, NONDET

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_UNKNOWN, EXIT_MISMATCH = 0, 1, 2, 3, 4

log = logging.getLogger("seuguard")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_analysis_flags(p):
    p.add_argument("--domain", action="append", default=[], metavar="VAR=LO..HI",
                   help="inclusive input range (repeatable; default 0..15; 'input=LO..HI' for input() reads)")
    p.add_argument("--unwind", type=int, default=16, help="loop iteration bound per loop entry (default 16)")
    p.add_argument("--cycles", type=int, default=None,
                   help="control cycles explored for while(true) programs (default: --unwind)")
    p.add_argument("--reads", type=int, default=4, metavar="N", help="max input() reads per cycle (default 4)")
    p.add_argument("--fault-bits", default="0..31", metavar="LO..HI", help="bit positions that may flip (default 0..31)")
    p.add_argument("--trigger", choices=(NONDET, FIRST_USE), default=NONDET,
                   help="nondet: flip at any use or never; first-use: flip at the first use")
    p.add_argument("--jobs", type=int, default=1, help="analyse variables in parallel processes")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--timings", action="store_true", help="include per-variable run times (not deterministic)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="seuguard", description="Find variables whose single bit upset can change a safety verdict.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="classify the variables of one program")
    a.add_argument("source", help="CtrlC source file (.ctl)")
    a.add_argument("--property", "-p", help="property text or .prop file (default: sidecar .prop)")
    sel = a.add_mutually_exclusive_group()
    sel.add_argument("--var", action="append", metavar="NAME", help="variable to analyse (repeatable)")
    sel.add_argument("--all", action="store_true", help="analyse every variable (default)")
    eng = a.add_mutually_exclusive_group()
    eng.add_argument("--engine", choices=("checker", "oracle", "differential"), default=None)
    eng.add_argument("--oracle", action="store_true", help="same as --engine oracle")
    eng.add_argument("--differential", action="store_true", help="same as --engine differential")
    a.add_argument("--name", help="program name shown in the report")
    _add_analysis_flags(a)
    emit_group = a.add_mutually_exclusive_group()
    emit_group.add_argument("--emit-cfg", action="store_true", help="print the control flow graph (DOT) and exit")
    emit_group.add_argument("--emit-pdg", action="store_true", help="print the dependence graph (DOT) and exit")
    emit_group.add_argument("--emit-slice", action="store_true", help="print the source with sliced-away lines marked")
    emit_group.add_argument("--emit-instrumented", action="store_true",
                            help="print the self-composed program for --var and exit")

    b = sub.add_parser("bench", help="run the benchmark manifest and print the summary table")
    b.add_argument("--manifest", default=None, help="manifest.json (default: benchmarks/manifest.json)")
    b.add_argument("--check", action="store_true", help="compare against the expected reports")
    b.add_argument("--format", choices=FORMATS, default="table")

    v = sub.add_parser("vars", help="list the variables of a program in declaration order")
    v.add_argument("source")
    return ap


def _domains(args) -> InputDomain:
    try:
        items = [parse_assignment(d) for d in args.domain]
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.reads < 0:
        raise UsageError("--reads must be >= 0")
    return InputDomain.from_assignments(items, reads_per_cycle=args.reads)


def _engine(args) -> str:
    if args.oracle:
        return "oracle"
    if args.differential:
        return "differential"
    return args.engine or "checker"


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except UnicodeDecodeError:
        return Path(path).read_bytes().decode("utf-8", errors="replace")


def _print_diagnostics(exc: ParseError, path: str):
    for d in exc.diagnostics:
        print(f"{path}:{d.span.line}:{d.span.col}: {d.severity}: {d.message}", file=sys.stderr)


def cmd_analyze(args) -> int:
    text = _read(args.source)
    program = parse(text)
    for w in program.warnings:
        print(f"{args.source}:{w.span.line}:{w.span.col}: warning: {w.message}", file=sys.stderr)
    if args.emit_cfg:
        sys.stdout.write(to_dot(build_cfg(program), program.name))
        return EXIT_OK
    if args.emit_pdg:
        sys.stdout.write(to_dot(build_pdg(build_cfg(program)), program.name))
        return EXIT_OK
    spec = load_property(args.property, args.source)
    if args.emit_slice:
        sys.stdout.write(render_slice(text, program, slice_program(program, spec)))
        return EXIT_OK
    if args.emit_instrumented:
        if not args.var or len(args.var) != 1:
            raise UsageError("--emit-instrumented needs exactly one --var")
        sys.stdout.write(emit(self_compose(program, spec, args.var[0])))
        return EXIT_OK
    try:
        bits = parse_range(args.fault_bits)
    except DomainError as exc:
        raise UsageError(f"--fault-bits: {exc}") from exc
    try:
        cfg = AnalysisConfig(
            source=args.source, property=args.property, variables=args.var, domains=_domains(args),
            unwind=args.unwind, cycles=args.cycles, bit_positions=bits, trigger=args.trigger,
            engine=_engine(args), name=args.name, jobs=args.jobs,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    report = analyze(cfg, program=program, spec=spec)
    sys.stdout.write(emit_report(report, args.format, args.timings))
    if report.mismatches:
        for r in report.mismatches:
            print(f"MISMATCH {r.variable}: checker {r.verdict.key()} vs oracle {r.oracle.key()}", file=sys.stderr)
            for label, v in (("checker", r.verdict), ("oracle", r.oracle)):
                c = v.counterexample
                print(f"  {label} counterexample: {c.to_dict() if c else None}", file=sys.stderr)
        return EXIT_MISMATCH
    if report.unknown_count:
        return EXIT_UNKNOWN
    return EXIT_OK


def default_manifest() -> Path:
    here = Path(__file__).resolve()
    for base in [Path.cwd(), *here.parents]:
        m = base / "benchmarks" / "manifest.json"
        if m.exists():
            return m
    raise UsageError("benchmarks/manifest.json not found; pass --manifest")


def cmd_bench(args) -> int:
    manifest = Path(args.manifest) if args.manifest else default_manifest()
    reports = []
    status = EXIT_OK
    for cfg, expected in load_manifest(manifest):
        report = analyze(cfg)
        reports.append(report)
        if args.check and expected is not None:
            got = emit_report(report, "json")
            want = expected.read_text(encoding="utf-8")
            if got != want:
                print(f"{cfg.name}: report differs from {expected.name}", file=sys.stderr)
                status = EXIT_MISMATCH
        if report.unknown_count and status == EXIT_OK:
            status = EXIT_UNKNOWN
    if args.format == "table":
        print(summary_table(reports))
    else:
        for r in reports:
            sys.stdout.write(emit_report(r, args.format))
    return status


def cmd_vars(args) -> int:
    program = parse(_read(args.source))
    for v in program.variables:
        print(v)
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    handlers = {"analyze": cmd_analyze, "bench": cmd_bench, "vars": cmd_vars}
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"seuguard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        _print_diagnostics(exc, getattr(args, "source", "<input>"))
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"seuguard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PropertyError as exc:
        print(f"seuguard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CheckerError as exc:
        print(f"seuguard: internal error: {exc}", file=sys.stderr)
        return 70


if __name__ == "__main__":
    sys.exit(main())
