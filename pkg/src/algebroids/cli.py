"""Command-line driver.

Subcommands: validate, cohomology, pullback, morita, mc, foliation.
Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input error.
JSON reports follow one schema:

    { "command": str,
      "blocks": [ { "degree": int, "weight": int,
                    "betti_left": int, "betti_right": int|null,
                    "pass": bool } ],
      "pass": bool }

Output is byte-stable for fixed inputs: block order is (weight, degree)
ascending and no timestamps or environment data are emitted.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass

from .algebroid import validate as validate_presentation
from .cohomology import betti, morita_check
from .complexes import DeformationComplex, ElementComplex
from .deformation import mc_defect
from .dsl import Diagnostic, SpecDocument, emit, parse
from .foliation import def_vs_bott, flag_check
from .pullback import pullback_algebroid

EXIT_OK = 0
EXIT_MATH_FAIL = 1
EXIT_INPUT_ERROR = 2

_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


class InputError(Exception):
    pass


def _parse_range(text: str, what: str) -> list[int]:
    m = _RANGE.match(text)
    if not m:
        raise InputError(f"bad {what} range {text!r}; expected LO..HI")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise InputError(f"empty {what} range {text!r}")
    return list(range(lo, hi + 1))


def _load(path: str) -> SpecDocument:
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    result = parse(text)
    if not result.ok:
        raise InputError("; ".join(d.render() for d in result.diagnostics))
    return result.document


def _need(table: dict, name: str, what: str):
    obj = table.get(name)
    if obj is None:
        raise InputError(f"unknown {what} {name!r}")
    return obj


@dataclass
class Block:
    degree: int
    weight: int
    betti_left: int
    betti_right: int | None
    ok: bool


def _report(command: str, blocks: list[Block], ok: bool, fmt: str, out) -> None:
    if fmt == "json":
        payload = {
            "command": command,
            "blocks": [
                {"degree": b.degree, "weight": b.weight, "betti_left": b.betti_left,
                 "betti_right": b.betti_right, "pass": b.ok}
                for b in blocks
            ],
            "pass": ok,
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        if any(b.betti_right is not None for b in blocks):
            out.write("degree,weight,betti_left,betti_right,pass\n")
            for b in blocks:
                out.write(f"{b.degree},{b.weight},{b.betti_left},{b.betti_right},"
                          f"{str(b.ok).lower()}\n")
        else:
            out.write("degree,weight,betti\n")
            for b in blocks:
                out.write(f"{b.degree},{b.weight},{b.betti_left}\n")
    else:
        header = f"{'deg':>4} {'weight':>6} {'left':>6} {'right':>6} {'pass':>5}"
        out.write(header + "\n")
        for b in blocks:
            right = "-" if b.betti_right is None else str(b.betti_right)
            out.write(f"{b.degree:>4} {b.weight:>6} {b.betti_left:>6} {right:>6} "
                      f"{('ok' if b.ok else 'FAIL'):>5}\n")
        out.write(f"overall: {'pass' if ok else 'FAIL'}\n")


def _sorted_blocks(blocks: list[Block]) -> list[Block]:
    return sorted(blocks, key=lambda b: (b.weight, b.degree))


def _cmd_validate(args, out, err) -> int:
    doc = _load(args.file)
    ok = True
    lines = []
    for name, pres in doc.algebroids.items():
        bad = pres.weight_violations()
        if bad:
            kind, key, expected, _ = bad[0]
            span = doc.span_of(kind, name, *(key[1:] if kind == "anchor" else key[1:]))
            raise InputError(
                f"{name}: {kind} entry {key} is not weight homogeneous "
                f"(expected weight {expected}; line {span.line}, col {span.column})")
        report = validate_presentation(pres)
        if report.passed:
            lines.append(f"{name}: ok")
        else:
            ok = False
            gens = ", ".join(g for g, _ in report.failures)
            lines.append(f"{name}: FAIL residual on generator(s) {gens}")
    if args.format == "json":
        _report("validate", [], ok, "json", out)
    else:
        for line in lines:
            out.write(line + "\n")
    return EXIT_OK if ok else EXIT_MATH_FAIL


def _cmd_cohomology(args, out, err) -> int:
    doc = _load(args.file)
    pres = _need(doc.algebroids, args.name, "algebroid")
    degrees = _parse_range(args.deg, "degree")
    weights = _parse_range(args.weight, "weight")
    if not validate_presentation(pres).passed:
        raise InputError(f"{args.name} is not a Lie algebroid (validation fails)")
    if args.kind == "dr":
        cx = ElementComplex.of_de_rham(pres.de_rham())
    else:
        cx = DeformationComplex(pres.de_rham())
    table = betti(cx, degrees, weights, jobs=args.jobs)
    blocks = [Block(n, w, table.betti(n, w), None, True)
              for w in weights for n in degrees]
    _report("cohomology", _sorted_blocks(blocks), True, args.format, out)
    return EXIT_OK


def _cmd_pullback(args, out, err) -> int:
    doc = _load(args.file)
    pres = _need(doc.algebroids, args.name, "algebroid")
    sub = _need(doc.submersions, args.submersion, "submersion")
    if not validate_presentation(pres).passed:
        raise InputError(f"{args.name} is not a Lie algebroid (validation fails)")
    try:
        ppres = pullback_algebroid(pres, sub)
    except ValueError as exc:
        raise InputError(str(exc))
    result = SpecDocument()
    pname = ppres.presentation.name
    result.algebroids[pname] = ppres.presentation
    result.order = [("algebroid", pname)]
    text = emit(result)
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.write(f"wrote {pname} to {args.out}\n")
    return EXIT_OK


def _cmd_morita(args, out, err) -> int:
    doc = _load(args.file)
    pres = _need(doc.algebroids, args.name, "algebroid")
    sub = _need(doc.submersions, args.submersion, "submersion")
    weights = _parse_range(args.weight, "weight")
    if not validate_presentation(pres).passed:
        raise InputError(f"{args.name} is not a Lie algebroid (validation fails)")
    try:
        report = morita_check(pres, sub, args.kind, args.max_deg, weights,
                              jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc))
    blocks = [Block(b.degree, b.weight, b.betti_left, b.betti_right, b.passed)
              for b in report.blocks]
    _report("morita", _sorted_blocks(blocks), report.passed, args.format, out)
    return EXIT_OK if report.passed else EXIT_MATH_FAIL


def _cmd_mc(args, out, err) -> int:
    doc = _load(args.file)
    pres = _need(doc.algebroids, args.name, "algebroid")
    c = _need(doc.cochains, args.cochain, "cochain")
    if doc.cochain_on.get(args.cochain) != args.name:
        raise InputError(f"cochain {args.cochain!r} is not declared on {args.name!r}")
    if not validate_presentation(pres).passed:
        raise InputError(f"{args.name} is not a Lie algebroid (validation fails)")
    try:
        report = mc_defect(c, pres)
    except ValueError as exc:
        raise InputError(str(exc))
    if args.format == "json":
        _report("mc", [], report.is_mc, "json", out)
    else:
        if report.is_mc:
            out.write(f"{args.cochain}: Maurer-Cartan (deformed bracket satisfies Jacobi)\n")
        else:
            gens = ", ".join(report.defect.derivation.images)
            out.write(f"{args.cochain}: defect nonzero on generator(s) {gens}\n")
    return EXIT_OK if report.is_mc else EXIT_MATH_FAIL


def _cmd_foliation(args, out, err) -> int:
    doc = _load(args.file)
    if args.check == "def-vs-bott":
        spec = _need(doc.foliations, args.name, "foliation")
        degrees = _parse_range(args.deg, "degree")
        weights = _parse_range(args.weight, "weight")
        report = def_vs_bott(spec, degrees, weights)
        blocks = [Block(b.degree, b.weight, b.bott, b.deformation, b.equal)
                  for b in report.blocks]
        _report("foliation", _sorted_blocks(blocks), report.all_equal, args.format, out)
        for finding in report.findings:
            err.write(finding + "\n")
        return EXIT_OK if report.all_equal else EXIT_MATH_FAIL
    # flag check
    sub = _need(doc.submersions, args.vertical, "submersion")
    fol = _need(doc.foliations, args.horizontal, "foliation")
    expected = tuple(sub.base) + tuple(sub.fibers)
    if fol.ambient != expected:
        raise InputError(
            f"foliation {args.horizontal!r} must live on the total space "
            f"{[n for n, _ in expected]}")
    weights = _parse_range(args.weight, "weight")
    try:
        report = flag_check(sub, [list(r) for r in fol.spanning], args.max_deg, weights)
    except ValueError as exc:
        raise InputError(str(exc))
    blocks = [Block(b.degree, b.weight, b.betti_left, b.betti_right, b.passed)
              for b in report.morita.blocks]
    _report("foliation", _sorted_blocks(blocks), report.passed, args.format, out)
    if not report.tables_isomorphic:
        for diff in report.table_differences:
            err.write(diff + "\n")
    return EXIT_OK if report.passed else EXIT_MATH_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lax",
        description="Exact cohomology for Lie algebroid presentation files (.lax)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every algebroid in the file")
    p.add_argument("file")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("cohomology", help="Betti table of one algebroid")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--kind", choices=["dr", "def"], required=True)
    p.add_argument("--deg", required=True, help="degree range LO..HI")
    p.add_argument("--weight", required=True, help="weight range LO..HI")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_cohomology)

    p = sub.add_parser("pullback", help="emit the pull-back along a submersion")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--submersion", required=True)
    p.add_argument("--out", required=True, help="output file, or - for stdout")
    p.set_defaults(fn=_cmd_pullback)

    p = sub.add_parser("morita", help="compare an algebroid with its pull-back")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--submersion", required=True)
    p.add_argument("--kind", choices=["dr", "def"], required=True)
    p.add_argument("--max-deg", type=int, required=True)
    p.add_argument("--weight", required=True, help="weight range LO..HI")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_morita)

    p = sub.add_parser("mc", help="Maurer-Cartan check for a stored cochain")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--cochain", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=_cmd_mc)

    p = sub.add_parser("foliation", help="foliation cross-checks")
    p.add_argument("file")
    p.add_argument("--check", choices=["def-vs-bott", "flag"], required=True)
    p.add_argument("--name", help="foliation name (def-vs-bott)")
    p.add_argument("--vertical", help="submersion name (flag)")
    p.add_argument("--horizontal", help="foliation name on the total space (flag)")
    p.add_argument("--deg", help="degree range LO..HI (def-vs-bott)")
    p.add_argument("--max-deg", type=int, help="top degree (flag)")
    p.add_argument("--weight", required=True, help="weight range LO..HI")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.set_defaults(fn=_cmd_foliation)
    return ap


def cli_run(argv, stdout=None, stderr=None) -> int:
    """Run the CLI on argv (no program name); returns the exit code."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse prints usage itself; normalize exit codes: 0 stays 0 (--help)
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR
    if args.command == "foliation":
        missing = []
        if args.check == "def-vs-bott":
            missing = [o for o, v in [("--name", args.name), ("--deg", args.deg)] if not v]
        else:
            missing = [o for o, v in [("--vertical", args.vertical),
                                      ("--horizontal", args.horizontal),
                                      ("--max-deg", args.max_deg)] if v in (None, "")]
        if missing:
            err.write(f"missing required options for --check {args.check}: "
                      f"{', '.join(missing)}\n")
            return EXIT_INPUT_ERROR
    try:
        return args.fn(args, out, err)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR


def main() -> None:
    sys.exit(cli_run(sys.argv[1:]))


if __name__ == "__main__":
    main()
