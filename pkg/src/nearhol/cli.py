"""Command-line front end: ``nearhol spectrum | verify | conjecture``.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 unsupported.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .bundles import parse_bundle
from .decomp import DecompositionTable, KTypeEntry, L2Status, conjecture_scan, spectrum_support
from .errors import DomainError, NearholError, ParameterError, UnsupportedError
from .integrals import QuadratureSpec
from .rootdata import HermitianType, RootSystemData, build_root_data
from .suites import SUITES, available_suites, run_suites
from .weights import Partition, Weight

SPECTRUM_SCHEMA = "nearhol.spectrum/1"
VERIFY_SCHEMA = "nearhol.verify/1"
CONJECTURE_SCHEMA = "nearhol.conjecture/1"
MAX_CUTOFF = 12

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3


@dataclass
class JobConfig:
    space: str
    bundle: str = "line:0"
    cutoff: int = 2
    output: str = "json"
    seed: int = 0
    suite: str = "all"
    quadrature: dict = field(default_factory=dict)
    probe_rank: int = 1

    def validate(self) -> RootSystemData:
        if not 0 <= self.cutoff <= MAX_CUTOFF:
            raise ParameterError(f"cutoff must be in [0, {MAX_CUTOFF}]")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")
        if self.output not in ("json", "csv", "md"):
            raise ParameterError(f"unknown output format {self.output!r}")
        return build_root_data(HermitianType.parse(self.space))

    def quadrature_spec(self) -> QuadratureSpec:
        return QuadratureSpec(seed=self.seed, **self.quadrature)


# -- serialization -----------------------------------------------------------


def _frac_list(xs) -> list[str]:
    return [str(Fraction(x)) for x in xs]


def header(data: RootSystemData) -> dict:
    h = data.htype
    return {"r": h.r, "a": h.a, "b": h.b, "g": h.g, "n": h.n}


def table_to_dict(table: DecompositionTable, data: RootSystemData) -> dict:
    rows = []
    for e in table.entries:
        m, shift = e.origin
        rows.append({
            "weight": _frac_list(e.weight),
            "multiplicity": e.multiplicity,
            "exact": e.exact,
            "status": e.l2_status.value,
            "m": list(m),
            "shift": _frac_list(shift),
        })
    return {
        "schema": SPECTRUM_SCHEMA,
        "space": str(data.htype),
        "bundle": str(table.bundle),
        "header": header(data),
        "cutoff": table.cutoff,
        "multiplicity_free": table.multiplicity_free,
        "rows": rows,
    }


def table_from_dict(d: dict) -> tuple[DecompositionTable, RootSystemData]:
    if d.get("schema") != SPECTRUM_SCHEMA:
        raise ParameterError(f"unsupported schema {d.get('schema')!r}")
    data = build_root_data(HermitianType.parse(d["space"]))
    if d["header"] != header(data):
        raise ParameterError("header does not match the space")
    bundle = parse_bundle(d["bundle"], data)
    entries = [
        KTypeEntry(
            Weight(Fraction(x) for x in row["weight"]),
            int(row["multiplicity"]),
            L2Status(row["status"]),
            (Partition(row["m"]), Weight(Fraction(x) for x in row["shift"])),
            bool(row["exact"]),
        )
        for row in d["rows"]
    ]
    return DecompositionTable(bundle, int(d["cutoff"]), entries, bool(d["multiplicity_free"])), data


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(columns, rows, preamble) -> str:
    buf = io.StringIO()
    for key, val in preamble.items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _md(columns, rows, preamble) -> str:
    lines = [f"- {key}: {val}" for key, val in preamble.items()]
    lines += ["", "| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def _render(fmt, doc, columns, rows, preamble) -> str:
    if fmt == "json":
        return _json(doc)
    return (_csv if fmt == "csv" else _md)(columns, rows, preamble)


def _num(x: float):
    return x if math.isfinite(x) else str(x)


# -- commands ----------------------------------------------------------------


def cmd_spectrum(cfg: JobConfig) -> tuple[int, str]:
    """K-types of Poly(n-, E) up to the cutoff, with multiplicity bounds and L^2 statuses.

    Purely combinatorial, so it also runs for the exceptional spaces.
    """
    data = cfg.validate()
    bundle = parse_bundle(cfg.bundle, data)
    table = spectrum_support(bundle, cfg.cutoff, data)
    doc = table_to_dict(table, data)
    cols = ["weight", "multiplicity", "exact", "status", "m", "shift"]
    rows = [
        ["(" + ",".join(r["weight"]) + ")", r["multiplicity"], r["exact"], r["status"],
         "(" + ",".join(map(str, r["m"])) + ")", "(" + ",".join(r["shift"]) + ")"]
        for r in doc["rows"]
    ]
    pre = {"schema": SPECTRUM_SCHEMA, "space": doc["space"], "bundle": doc["bundle"],
           **doc["header"], "cutoff": cfg.cutoff}
    return EXIT_OK, _render(cfg.output, doc, cols, rows, pre)


def cmd_verify(cfg: JobConfig) -> tuple[int, str]:
    """Run the named invariant suites; exit 1 if any check fails."""
    data = cfg.validate()
    if cfg.suite == "all":
        suites = available_suites(data)
    elif cfg.suite in SUITES:
        suites = (cfg.suite,)
    else:
        raise ParameterError(f"unknown suite {cfg.suite!r}")
    checks = run_suites(data, suites, cfg.seed, cfg.quadrature_spec(), max(cfg.cutoff, 1))
    ok = all(c.passed for c in checks)
    if not ok:
        names = ", ".join(f"{c.suite}.{c.name}" for c in checks if not c.passed)
        print(f"nearhol: failed invariants: {names}", file=sys.stderr)
    doc = {
        "schema": VERIFY_SCHEMA,
        "space": str(data.htype),
        "header": header(data),
        "suites": list(suites),
        "seed": cfg.seed,
        "passed": ok,
        "checks": [
            {"suite": c.suite, "name": c.name, "passed": c.passed, "residual": _num(c.residual),
             "tolerance": c.tolerance, "detail": c.detail}
            for c in checks
        ],
    }
    cols = ["suite", "name", "passed", "residual", "tolerance", "detail"]
    rows = [[c.suite, c.name, "PASS" if c.passed else "FAIL", repr(c.residual), c.tolerance, c.detail]
            for c in checks]
    pre = {"schema": VERIFY_SCHEMA, "space": doc["space"], **doc["header"], "seed": cfg.seed,
           "result": "PASS" if ok else "FAIL"}
    return (EXIT_OK if ok else EXIT_FAIL), _render(cfg.output, doc, cols, rows, pre)


def cmd_conjecture(cfg: JobConfig) -> tuple[int, str]:
    """Compare the diagonal degree criterion with decided L^2 membership; reports, never asserts."""
    data = cfg.validate()
    bundle = parse_bundle(cfg.bundle, data)
    report = conjecture_scan(bundle, cfg.cutoff, data, probe_max_rank=cfg.probe_rank, spec=cfg.quadrature_spec())
    rows_doc = [
        {"m": list(r.m), "weight": _frac_list(r.weight), "degrees": list(r.degrees),
         "degree_ok": r.degree_ok, "lower_ok": r.lower_ok, "dominant": r.dominant, "reference": r.reference,
         "source": r.source, "status": r.status}
        for r in report.rows
    ]
    doc = {
        "schema": CONJECTURE_SCHEMA,
        "space": str(data.htype),
        "bundle": str(bundle),
        "header": header(data),
        "cutoff": cfg.cutoff,
        "counts": report.counts(),
        "rows": rows_doc,
    }
    cols = ["m", "weight", "degrees", "degree_ok", "lower_ok", "dominant", "reference", "source", "status"]
    rows = [
        ["(" + ",".join(map(str, r["m"])) + ")", "(" + ",".join(r["weight"]) + ")",
         "(" + ",".join(map(str, r["degrees"])) + ")", r["degree_ok"], r["lower_ok"], r["dominant"], r["reference"],
         r["source"], r["status"]]
        for r in rows_doc
    ]
    pre = {"schema": CONJECTURE_SCHEMA, "space": doc["space"], "bundle": doc["bundle"],
           **doc["header"], "cutoff": cfg.cutoff, **doc["counts"]}
    return EXIT_OK, _render(cfg.output, doc, cols, rows, pre)


COMMANDS = {"spectrum": cmd_spectrum, "verify": cmd_verify, "conjecture": cmd_conjecture}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nearhol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("spectrum", "K-type table of Poly(n-, E)"),
                        ("verify", "run invariant suites"),
                        ("conjecture", "scan highest weight vectors against the degree criterion")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--space", required=True, help='space selector, e.g. "I:2,3", "II:4", "EVII"')
        p.add_argument("--bundle", default="line:0", help='"line:k", "cotangent" or "mu:c1,c2,..."')
        p.add_argument("--cutoff", type=int, default=2, help=f"max |m| (at most {MAX_CUTOFF})")
        p.add_argument("--output", choices=("json", "csv", "md"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write to this file instead of stdout")
        if name == "verify":
            p.add_argument("--suite", choices=SUITES + ("all",), default="all")
        if name == "conjecture":
            p.add_argument("--probe-rank", type=int, default=1,
                           help="run numerical norm probes on spaces up to this rank")
        if name in ("verify", "conjecture"):
            p.add_argument("--scheme", choices=("radial", "mc"))
            p.add_argument("--nodes", type=int)
            p.add_argument("--tol", type=float)
            p.add_argument("--samples", type=int)
    return parser


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    quad = {k: getattr(ns, k) for k in ("scheme", "nodes", "tol", "samples") if getattr(ns, k, None) is not None}
    return JobConfig(ns.space, ns.bundle, ns.cutoff, ns.output, ns.seed, getattr(ns, "suite", "all"), quad,
                     getattr(ns, "probe_rank", 1))


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        code, text = COMMANDS[ns.command](config_from_args(ns))
    except UnsupportedError as exc:
        print(f"nearhol: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ParameterError, DomainError) as exc:
        print(f"nearhol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NearholError as exc:
        print(f"nearhol: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
