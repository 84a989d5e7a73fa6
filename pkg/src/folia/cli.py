"""Command line entry point: ``folia <command> <file> [options]``."""

from __future__ import annotations

import argparse
import sys
import time
import warnings

from .firstintegral import (
    constant_cofactor_search,
    extactic_polynomial,
    find_first_integrals,
)
from .foliation import (
    DEFAULT_SPAN_CAP,
    DEFAULT_WORD_CAP,
    AtLeast,
    Finite,
    FoliationSpec,
    close_under_brackets,
    contact_order,
)
from .groebner import UnsupportedSize
from .invariant import DEFAULT_MAX_DEGREE, nf_profile
from .parse import FoliationFile, ParseError, parse_foliation_file
from .report import Analysis, Report, emit_report, to_text

COMMANDS = ("contact-order", "invariant", "profile", "extactic", "first-integral")

EXIT_OK, EXIT_ANALYSIS, EXIT_USAGE = 0, 1, 2

BRACKET_DEGREE_CAP = 2
BRACKET_SIZE_CAP = 8


class UsageError(ValueError):
    pass


def _foliation(ff: FoliationFile) -> tuple[FoliationSpec, list[str]]:
    if not ff.fields:
        raise UsageError("file declares no field")
    spec = close_under_brackets(list(ff.fields.values()), BRACKET_DEGREE_CAP, BRACKET_SIZE_CAP,
                                names=list(ff.fields))
    notes = []
    if not spec.bracket_closed:
        notes.append(f"bracket closure not certified (degree cap {BRACKET_DEGREE_CAP}, "
                     f"size cap {BRACKET_SIZE_CAP})")
    elif len(spec) > len(ff.fields):
        notes.append("brackets appended to generators: " + ", ".join(spec.names[len(ff.fields):]))
    return spec, notes


def _select(table: dict, names, kind: str) -> list:
    if not names:
        return list(table.items())
    missing = [n for n in names if n not in table]
    if missing:
        raise UsageError(f"unknown {kind} name(s): {', '.join(missing)}")
    return [(n, table[n]) for n in names]


def _coords(ff: FoliationFile, point) -> list[str]:
    return [ff.ctx.format_scalar(c) for c in point.coords]


def _option(value, ff: FoliationFile, name: str, default: int, minimum: int) -> int:
    if value is None:
        value = ff.options.get(name, default)
    if not isinstance(value, int) or value < minimum:
        raise UsageError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def run_analysis(ff: FoliationFile, command: str, points=None, candidate=None, degree=None,
                 max_degree=None, word_cap=None, span_cap=None, timing: bool = False) -> Report:
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    report = Report()
    spec, notes = _foliation(ff)
    report.warnings.extend(notes)
    started = time.perf_counter()

    if command == "contact-order":
        wc = _option(word_cap, ff, "word_cap", DEFAULT_WORD_CAP, 0)
        sc = _option(span_cap, ff, "span_cap", DEFAULT_SPAN_CAP, 1)
        cands = _select(ff.candidates, [candidate] if candidate else None, "candidate")
        if not cands:
            raise UsageError("contact-order needs a candidate")
        pts = _select(ff.points, points, "point")
        rows, warns = [], []
        for cname, f in cands:
            for pname, pt in pts:
                res = contact_order(f, spec, pt, wc, sc)
                row = {"candidate": cname, "point": pname, "kind": res.kind, "order": None,
                       "word": None, "certificate": None, "via": None}
                if isinstance(res, Finite):
                    row["order"] = str(res.order)
                    row["word"] = [spec.names[i] for i in res.word]
                elif isinstance(res, AtLeast):
                    row["order"] = f">={res.bound}"
                    warns.append(f"word cap reached for {cname} at {pname}")
                else:
                    row["order"] = "inf"
                    row["certificate"] = [str(p) for p in res.certificate]
                    row["via"] = res.via
                rows.append(row)
        inputs = {"generators": [f"{n} = {d}" for n, d in zip(spec.names, spec)],
                  "word_cap": str(wc), "span_cap": str(sc)}
        report.analyses.append(Analysis(command, inputs, {"rows": rows}, warns))

    elif command in ("invariant", "profile"):
        n_max = _option(max_degree, ff, "max_degree", DEFAULT_MAX_DEGREE, 1)
        pts = _select(ff.points, points, "point")
        if not pts:
            raise UsageError(f"{command} needs at least one point")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            table = nf_profile([p for _, p in pts], spec, n_max)
        rows, warns = [], []
        for (pname, pt), r in zip(pts, table):
            row = {"point": pname, "coords": _coords(ff, pt), "tag": pt.tag,
                   "dimension": None if r.dimension is None else str(r.dimension),
                   "stabilized": r.stabilized, "certified": r.certified}
            if command == "invariant":
                row["generators"] = [str(g) for g in r.generators]
            row["error"] = r.error
            if r.error:
                report.errors += 1
            if r.certified is False:
                warns.append(f"kernel at {pname} not certified; dimension may be underestimated")
            if r.stabilized is False:
                warns.append(f"estimate at {pname} not stabilized at degree {n_max}")
            warns.extend(f"{pname}: {w}" for w in r.warnings)
            rows.append(row)
        inputs = {"generators": [f"{n} = {d}" for n, d in zip(spec.names, spec)],
                  "max_degree": str(n_max)}
        report.analyses.append(Analysis(command, inputs, {"rows": rows}, warns))

    elif command == "extactic":
        deg = _option(degree, ff, "degree", 1, 0)
        rows = []
        for name, d in ff.fields.items():
            try:
                e = extactic_polynomial(d, deg)
                rows.append({"field": name, "degree": str(deg), "polynomial": str(e),
                             "vanishes": not e, "error": None})
            except UnsupportedSize as exc:
                report.errors += 1
                rows.append({"field": name, "degree": str(deg), "polynomial": None,
                             "vanishes": None, "error": str(exc)})
        report.analyses.append(Analysis(command, {"degree": str(deg)}, {"rows": rows}))

    else:  # first-integral
        deg = _option(degree, ff, "degree", 1, 1)
        warns: list[str] = []
        pair_rows = []
        for name, d in zip(spec.names, spec):
            for p in constant_cofactor_search(d, deg, []):
                pair_rows.append({"field": name, "f": str(p.f), "cofactor": str(p.cofactor)})
        integrals = find_first_integrals(spec, deg, warns)
        rows = [{"first_integral": str(fi), "numerator": str(fi.numerator),
                 "denominator": str(fi.denominator),
                 "exponents": [f"({f})^{e}" for f, e in fi.factors],
                 "verified": True} for fi in integrals]
        if not integrals:
            warns.append(f"no first integral found from degree-{deg} Darboux pairs")
        result = {"rows": rows, "darboux_pairs": [f"{r['field']}: {r['f']} [{r['cofactor']}]"
                                                  for r in pair_rows]}
        report.analyses.append(Analysis(command, {"degree": str(deg)}, result,
                                        sorted(set(warns), key=warns.index)))

    if timing:
        report.analyses[-1].micros = int((time.perf_counter() - started) * 1e6)
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folia", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file")
    ap.add_argument("--point", action="append", dest="points", metavar="NAME")
    ap.add_argument("--candidate", metavar="NAME")
    ap.add_argument("--degree", type=int, metavar="N")
    ap.add_argument("--max-degree", type=int, metavar="N")
    ap.add_argument("--word-cap", type=int, metavar="N")
    ap.add_argument("--span-cap", type=int, metavar="N")
    ap.add_argument("--json", metavar="PATH", help="also write the JSON report here ('-' for stdout)")
    ap.add_argument("--timing", action="store_true", help="record wall-clock micros (breaks byte-identity)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"folia: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        ff = parse_foliation_file(text)
    except ParseError as exc:
        print(f"folia: {args.file}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    try:
        report = run_analysis(ff, args.command, args.points, args.candidate, args.degree,
                              args.max_degree, args.word_cap, args.span_cap, args.timing)
    except UsageError as exc:
        print(f"folia: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError) as exc:
        print(f"folia: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    if args.json == "-":
        emit_report(report, "json")
    else:
        sys.stdout.write(to_text(report))
        if args.json:
            try:
                emit_report(report, "json", args.json)
            except OSError as exc:
                print(f"folia: cannot write {args.json}: {exc}", file=sys.stderr)
                return EXIT_ANALYSIS
    return EXIT_ANALYSIS if report.errors else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
