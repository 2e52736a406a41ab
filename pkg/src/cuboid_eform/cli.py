"""``cuboid-eform`` command line.

Exit codes: 0 every check passed, 1 a mathematical check failed (or the
input did not parse), 2 operational failure (I/O, corrupt corpus, bug).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

from . import __version__
from .polyparse import (
    CorpusIntegrityError,
    ParseError,
    load_kernel_corpus,
    parse_definitions,
    render,
)
from .polyring import EL, EL_WEIGHTS, HERON, MQL, Homogeneity, weighted_degree
from .report import VerificationReport
from .search import SHARDS_ENV, default_shards

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

RINGS = {"MQL": MQL, "EL": EL, "HERON": HERON}
SUITE_NAMES = ("s3", "factor", "eform", "kernel", "all")


class OperationalError(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    bound: int | None = None
    positive: bool = False
    primitive: bool = False
    input: Path | None = None
    output: Path | None = None
    shards: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command in ("search", "heron") and (self.bound is None or self.bound < 1):
            raise OperationalError(f"{self.command}: --bound must be a positive integer")
        if self.command in ("lift", "parse") and self.input is None:
            raise OperationalError(f"{self.command}: an input path is required")
        if self.shards < 1:
            raise OperationalError("--shards must be a positive integer")


@contextmanager
def _sink(path: Path | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8") as fh:
        yield fh


def _jsonl(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


# -- verify ---------------------------------------------------------------------


def _verify_report(suite: str, corpus: Path | None) -> VerificationReport:
    from . import cuboid_system as cs

    # read (and checksum) the corpus up front so a corrupt asset is never masked by a cache
    kernel = dict(load_kernel_corpus(corpus).items()) if suite in ("kernel", "all") else None
    report = VerificationReport()
    for name in (("s3", "factor", "eform", "kernel") if suite == "all" else (suite,)):
        if name == "kernel":
            report.extend(cs.verify_kernel_membership(kernel))
        else:
            report.extend(cs.SUITES[name]())
    return report


def cmd_verify(cfg: RunConfig) -> int:
    report = _verify_report(cfg.extra["suite"], cfg.input)
    with _sink(cfg.output) as out:
        out.write(report.to_json() + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


# -- reduce ---------------------------------------------------------------------


def cmd_reduce(cfg: RunConfig) -> int:
    from . import reduction as rd

    load_kernel_corpus()
    if cfg.extra.get("emit_equations"):
        mids = rd.derive_midpoint_equations().as_dict()
        with _sink(cfg.output) as out:
            for name, p in mids.items():
                out.write(f"{name}:={render(p)};\n")
        return EXIT_OK

    convention = cfg.extra.get("convention", "derived")
    comparisons = VerificationReport()
    comparisons.extend(rd.compare_midpoint_equations())
    checks = VerificationReport()
    for c in rd.verify_linear_solve().checks + rd.verify_e11_square().checks:
        (comparisons if c.name.endswith("vs-displayed") else checks).add(c)
    checks.extend(rd.verify_annihilation(convention))
    annihilated = [c for c in checks.checks if c.name.startswith("annihilation/")]
    doc = {
        "ok": checks.ok,
        "convention": convention,
        "annihilated": sum(c.passed for c in annihilated),
        "targets": len(annihilated),
        "checks": checks.to_dict()["checks"],
        "comparisons": comparisons.to_dict()["checks"],
    }
    with _sink(cfg.output) as out:
        out.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if checks.ok else EXIT_FAIL


# -- search / heron / lift ------------------------------------------------------


def _lift_dict(values) -> dict | None:
    from .reduction import lift_solution

    e10, e01, e11, l = values
    if e10 * e10 + e01 * e01 == 0:
        return None
    return lift_solution(e10, e01, e11, l).to_dict()


def cmd_search(cfg: RunConfig) -> int:
    from .search import search

    lift = cfg.extra.get("lift", False)
    status = EXIT_OK
    records = search(
        cfg.bound,
        positive_only=cfg.positive,
        primitive_only=cfg.primitive,
        shards=cfg.shards,
        backend=cfg.extra.get("backend"),
    )
    with _sink(cfg.output) as out:
        for rec in records:
            row = rec.to_dict()
            if lift:
                lifted = _lift_dict(rec.values())
                if lifted is not None:
                    row["lift"] = lifted
                    if not lifted["verified"]:
                        status = EXIT_FAIL
            out.write(_jsonl(row))
    return status


def cmd_heron(cfg: RunConfig) -> int:
    from .search import heron_search

    with _sink(cfg.output) as out:
        for rec in heron_search(cfg.bound, shards=cfg.shards, backend=cfg.extra.get("backend")):
            out.write(_jsonl(rec.to_dict()))
    return EXIT_OK


def _read_points(path: Path) -> list[dict]:
    text = path.read_text(encoding="utf-8").strip()
    if not text:
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [json.loads(line) for line in text.splitlines() if line.strip()]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(d, dict) for d in data):
        raise OperationalError(f"{path}: expected a JSON object, a list of objects, or JSON lines")
    return data


def cmd_lift(cfg: RunConfig) -> int:
    from .reduction import LiftError, lift_solution

    status = EXIT_OK
    with _sink(cfg.output) as out:
        for pt in _read_points(cfg.input):
            try:
                key = tuple(pt[k] for k in ("e10", "e01", "e11", "l"))
            except KeyError as exc:
                raise OperationalError(f"lift input record lacks {exc.args[0]!r}: {pt}") from None
            row = {"input": dict(zip(("e10", "e01", "e11", "l"), key))}
            try:
                res = lift_solution(*key)
            except LiftError as exc:
                row["error"] = str(exc)
                status = EXIT_FAIL
            else:
                row.update(res.to_dict())
                if not res.verified:
                    status = EXIT_FAIL
            out.write(_jsonl(row))
    return status


# -- parse ----------------------------------------------------------------------


def cmd_parse(cfg: RunConfig) -> int:
    ring = RINGS[cfg.extra.get("ring", "EL")]
    text = cfg.input.read_text(encoding="utf-8")
    try:
        defs = parse_definitions(text, ring, source=str(cfg.input))
    except ParseError as exc:
        print(f"{cfg.input}:{exc}", file=sys.stderr)
        return EXIT_FAIL
    with _sink(cfg.output) as out:
        for name, p in defs.items():
            head = "" if name.startswith("_") else f"{name}:="
            out.write(f"{head}{render(p)};\n")
        if cfg.extra.get("stats"):
            for name, p in defs.items():
                wd: object = "-"
                if ring is EL:
                    wd = weighted_degree(p, EL_WEIGHTS)
                    wd = wd.value if isinstance(wd, Homogeneity) else wd
                out.write(f"# {name}\tterms={len(p)}\ttotal_degree={p.total_degree()}\tweighted_degree={wd}\n")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "search": cmd_search,
    "heron": cmd_heron,
    "lift": cmd_lift,
    "parse": cmd_parse,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cuboid-eform",
        description="Exact checks of the perfect-cuboid E-form reduction and the biquadratic search.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def out_opt(p):
        p.add_argument("--out", type=Path, help="write to PATH instead of standard output")

    p = sub.add_parser("verify", help="S3 / factor / E-form / kernel identity suites")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--corpus", type=Path, help="kernel corpus override (skips the checksum)")
    out_opt(p)

    p = sub.add_parser("reduce", help="elimination down to the biquadratic equation")
    p.add_argument("--convention", choices=("derived", "displayed", "paper"), default="derived")
    p.add_argument("--emit-equations", action="store_true", help="print the four intermediate equations")
    out_opt(p)

    for name, helptext in (("search", "biquadratic solutions"), ("heron", "Heron triangles")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--bound", type=int, required=True)
        p.add_argument("--shards", type=int, default=None, help=f"worker threads (default ${SHARDS_ENV} or 1)")
        p.add_argument("--backend", choices=("numba", "numpy", "python"), default=None)
        if name == "search":
            p.add_argument("--positive", action="store_true")
            p.add_argument("--primitive", action="store_true")
            p.add_argument("--lift", action="store_true", help="attach the integer 10-tuple above each hit")
        out_opt(p)

    p = sub.add_parser("lift", help="lift biquadratic solutions read from JSON / JSON lines")
    p.add_argument("--input", type=Path, required=True)
    out_opt(p)

    p = sub.add_parser("parse", help="canonical rendering of a definitions file")
    p.add_argument("path", type=Path)
    p.add_argument("--ring", choices=tuple(RINGS), default="EL")
    p.add_argument("--stats", action="store_true")
    out_opt(p)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.command
    extra: dict = {}
    inp = None
    if cmd == "verify":
        extra["suite"] = ns.suite
        inp = ns.corpus
    elif cmd == "reduce":
        extra.update(convention=ns.convention, emit_equations=ns.emit_equations)
    elif cmd in ("search", "heron"):
        extra["backend"] = ns.backend
        if cmd == "search":
            extra["lift"] = ns.lift
    elif cmd == "lift":
        inp = ns.input
    elif cmd == "parse":
        inp = ns.path
        extra.update(ring=ns.ring, stats=ns.stats)
    shards = getattr(ns, "shards", None)
    return RunConfig(
        command=cmd,
        bound=getattr(ns, "bound", None),
        positive=getattr(ns, "positive", False),
        primitive=getattr(ns, "primitive", False),
        input=inp,
        output=ns.out,
        shards=default_shards() if shards is None else shards,
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:  # pragma: no cover
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_ERROR
    except (OperationalError, CorpusIntegrityError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
