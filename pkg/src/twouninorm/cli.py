"""Command-line interface.

Exit codes: 0 success, 2 input/validation error or refused request,
3 generator conditions failed, 4 axiom check failed, 5 search budget
exhausted (partial results are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .construct import (
    KINDS,
    ConditionsNotMet,
    ConstructionError,
    OpTable,
    construct_2uninorm,
    construct_alt_form,
    construct_variant,
    optable_from_json,
    write_table,
)
from .genfun import MODES, ConditionReport, GeneratorError, ModeMismatch, Status, check_conditions, read_generator
from .lattice import LatticeError, load_lattice
from .search import BudgetExceeded, SearchRefused, catalog_csv, search
from .verify import AxiomReport, Unclassifiable, classify, default_workers, verify_full

log = logging.getLogger("twouninorm")

EXIT_OK, EXIT_INPUT, EXIT_CONDITION, EXIT_AXIOM, EXIT_BUDGET = 0, 2, 3, 4, 5
FORMATS = ("text", "csv", "json")


class InputError(Exception):
    """Bad or unreadable input; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    lattice: Path | None = None
    generator: Path | None = None
    op: Path | None = None
    anchors: tuple[str, str, str] | None = None
    output: Path | None = None
    formats: tuple[str, ...] = ("text",)
    override: bool = False
    mode: str = "full"
    builder: str = "general"
    show_incomparable: bool = False
    bound: int = 3
    denominators: tuple[int, ...] = (1,)
    size_limit: int = 8
    node_limit: int = 200_000
    max_per_anchor: int | None = None
    workers: int = 1
    catalog: Path | None = None

    def __post_init__(self):
        if self.bound <= 0 or self.size_limit <= 0 or self.node_limit <= 0:
            raise InputError("search bounds must be positive")
        if any(d <= 0 for d in self.denominators):
            raise InputError("denominators must be positive")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise InputError(f"unknown format(s) {bad}; choose from {FORMATS}")


# ---------------------------------------------------------------------------
# report rendering


def _w(L, ids) -> str:
    return "-" if ids is None else "(" + ", ".join(L.labels(ids)) + ")"


def render_conditions(report: ConditionReport, L) -> str:
    lines = [f"conditions ({report.mode}, {report.direction.value})"]
    for e in report.entries:
        line = f"  {e.condition:<8} {e.status.value:<14} {_w(L, e.witness)}"
        if e.detail:
            line += f"  {e.detail}"
        lines.append(line)
    lines.append(f"  result: {'pass' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render_axioms(report: AxiomReport, L) -> str:
    lines = ["axioms"]
    for e in report.entries:
        wit = "-" if e.axiom == "well-classified" else _w(L, e.witness)
        line = f"  {e.axiom:<16} {e.status.value:<14} {wit}"
        if e.detail:
            line += f"  {e.detail}"
        lines.append(line)
    lines.append(f"  kind: {report.kind or '-'}")
    return "\n".join(lines) + "\n"


def conditions_json(report: ConditionReport, L) -> dict:
    return {
        "mode": report.mode,
        "direction": report.direction.value,
        "passed": report.passed,
        "entries": [
            {
                "condition": e.condition,
                "status": e.status.value,
                "witness": None if e.witness is None else list(L.labels(e.witness)),
                "detail": e.detail,
            }
            for e in report.entries
        ],
    }


def axioms_json(report: AxiomReport, L) -> dict:
    return {
        "passed": report.passed,
        "kind": report.kind,
        "entries": [
            {
                "axiom": e.axiom,
                "status": e.status.value,
                "witness": None
                if e.witness is None or e.axiom == "well-classified"
                else list(L.labels(e.witness)),
                "detail": e.detail,
            }
            for e in report.entries
        ],
    }


# ---------------------------------------------------------------------------
# helpers


def _need(cfg: RunConfig, name: str) -> Path:
    path = getattr(cfg, name)
    if path is None:
        raise InputError(f"--{name} is required for {cfg.command}")
    return path


def _lattice(cfg: RunConfig):
    path = _need(cfg, "lattice")
    try:
        return load_lattice(path)
    except OSError as exc:
        raise InputError(f"cannot read lattice: {exc}") from None


def _generator(cfg: RunConfig, L):
    path = _need(cfg, "generator")
    try:
        return read_generator(L, path)
    except OSError as exc:
        raise InputError(f"cannot read generator: {exc}") from None


def _emit(cfg: RunConfig, name: str, text: str) -> None:
    """Print to stdout, or write ``name`` inside the output directory."""
    if cfg.output is None:
        sys.stdout.write(text)
        return
    cfg.output.mkdir(parents=True, exist_ok=True)
    (cfg.output / name).write_text(text)


def _build(cfg: RunConfig, G) -> OpTable:
    if cfg.builder == "general":
        return construct_2uninorm(G, override=cfg.override)
    if cfg.builder == "alt-form":
        return construct_alt_form(G, override=cfg.override)
    return construct_variant(G, cfg.builder, override=cfg.override)


def _emit_table(cfg: RunConfig, T: OpTable) -> None:
    ext = {"text": "txt", "csv": "csv", "json": "json"}
    for fmt in cfg.formats:
        _emit(cfg, f"table.{ext[fmt]}", write_table(T, fmt))


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_lattice(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    out = [f"valid lattice: {L.size} elements, bottom {L.label(L.bottom)}, top {L.label(L.top)}"]
    out.append("normalized spec: " + json.dumps(L.to_spec()))
    if cfg.show_incomparable:
        for x in range(L.size):
            inc = sorted(L.incomparable_set(x))
            out.append(f"  |I_{L.label(x)}| = {len(inc)}  {' '.join(L.labels(inc))}")
    _emit(cfg, "lattice.txt", "\n".join(out) + "\n")
    return EXIT_OK


def cmd_check_generator(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    G = _generator(cfg, L)
    report = check_conditions(G, cfg.mode)
    if "json" in cfg.formats:
        _emit(cfg, "conditions.json", json.dumps(conditions_json(report, L), indent=1) + "\n")
    else:
        _emit(cfg, "conditions.txt", render_conditions(report, L))
    return EXIT_OK if report.passed else EXIT_CONDITION


def cmd_construct(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    G = _generator(cfg, L)
    T = _build(cfg, G)
    _emit_table(cfg, T)
    return EXIT_OK


def _load_op(cfg: RunConfig, L) -> OpTable:
    path = _need(cfg, "op")
    try:
        doc = json.loads(Path(path).read_text())
        return optable_from_json(L, doc, cfg.anchors)
    except OSError as exc:
        raise InputError(f"cannot read table: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad table file: {exc}") from None


def cmd_verify(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    T = _load_op(cfg, L)
    report = verify_full(T, cfg.workers)
    if "json" in cfg.formats:
        _emit(cfg, "axioms.json", json.dumps(axioms_json(report, L), indent=1) + "\n")
    else:
        _emit(cfg, "axioms.txt", render_axioms(report, L))
    return EXIT_OK if report.passed else EXIT_AXIOM


def cmd_classify(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    if cfg.op is not None:
        T = _load_op(cfg, L)
    else:
        T = _build(cfg, _generator(cfg, L))
    try:
        kind = classify(T)
    except Unclassifiable as exc:
        _emit(cfg, "kind.txt", f"unclassifiable: {exc}\n")
        return EXIT_AXIOM
    _emit(cfg, "kind.txt", kind + "\n")
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    G = _generator(cfg, L)
    report = check_conditions(G, cfg.mode)
    parts = [render_conditions(report, L)]
    if not report.passed and not cfg.override:
        _emit(cfg, "report.txt", "".join(parts))
        return EXIT_CONDITION
    T = _build(cfg, G)
    axioms = verify_full(T, cfg.workers)
    parts.append(render_axioms(axioms, L))
    if cfg.output is None:
        sys.stdout.write("".join(parts))
        if "text" in cfg.formats:
            sys.stdout.write(T.to_text())
    else:
        _emit(cfg, "report.txt", "".join(parts))
        _emit(cfg, "conditions.json", json.dumps(conditions_json(report, L), indent=1) + "\n")
        _emit(cfg, "axioms.json", json.dumps(axioms_json(axioms, L), indent=1) + "\n")
        _emit_table(cfg, T)
    if not axioms.passed:
        return EXIT_AXIOM
    return EXIT_OK


def cmd_search(cfg: RunConfig) -> int:
    L = _lattice(cfg)
    anchors = None
    if cfg.anchors is not None:
        anchors = [tuple(L.id(x) for x in cfg.anchors)]
    code = EXIT_OK
    try:
        result = search(
            L,
            anchors,
            bound=cfg.bound,
            denominators=cfg.denominators,
            max_per_anchor=cfg.max_per_anchor,
            node_limit=cfg.node_limit,
            size_limit=cfg.size_limit,
            workers=cfg.workers,
        )
    except SearchRefused as exc:
        raise InputError(str(exc)) from None
    except BudgetExceeded as exc:
        log.warning("%s", exc)
        result, code = exc.result, EXIT_BUDGET
    if result.counterexamples:
        code = EXIT_AXIOM
    text = catalog_csv(result)
    if cfg.catalog is not None:
        fresh = not cfg.catalog.exists() or cfg.catalog.stat().st_size == 0
        with open(cfg.catalog, "a") as fh:
            fh.write(text if fresh else catalog_csv(result, header=False))
    else:
        _emit(cfg, "catalog.csv", text)
    summary = (
        f"{len(result.findings)} admissible generators, {len(result.counterexamples)} failing validation, "
        f"{result.nodes} nodes{' (partial)' if result.partial else ''}\n"
    )
    sys.stderr.write(summary)
    return code


COMMANDS = {
    "check-lattice": cmd_check_lattice,
    "check-generator": cmd_check_generator,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "pipeline": cmd_pipeline,
    "search": cmd_search,
}


# ---------------------------------------------------------------------------
# argument parsing


def _anchors(text: str) -> tuple[str, str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("anchors are e1,a,e2")
    return tuple(parts)  # type: ignore[return-value]


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twouninorm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, generator=False, op=False):
        sp.add_argument("--lattice", "-l", type=Path, required=True)
        if generator:
            sp.add_argument("--generator", "-g", type=Path)
        if op:
            sp.add_argument("--op", type=Path)
            sp.add_argument("--anchors", type=_anchors, help="e1,a,e2 (overrides the table file)")
        sp.add_argument("--output", "-o", type=Path, help="directory for artifacts (default: stdout)")
        sp.add_argument("--out", dest="formats", action="append", choices=FORMATS, help="output format (repeatable)")

    def building(sp):
        sp.add_argument("--override", action="store_true", help="build even when conditions fail")
        sp.add_argument("--builder", default="general", choices=("general", "alt-form", *KINDS))
        sp.add_argument("--mode", default="full", choices=sorted(MODES))

    sp = sub.add_parser("check-lattice", help="validate a lattice file")
    common(sp)
    sp.add_argument("--incomparable", dest="show_incomparable", action="store_true")

    sp = sub.add_parser("check-generator", help="evaluate the admissibility conditions")
    common(sp, generator=True)
    sp.add_argument("--mode", default="full", choices=sorted(MODES))

    sp = sub.add_parser("construct", help="build the operation table")
    common(sp, generator=True)
    building(sp)

    sp = sub.add_parser("verify", help="check the axioms of a table file")
    common(sp, op=True)
    sp.add_argument("--workers", type=int)

    sp = sub.add_parser("classify", help="name the kind of a table or generator")
    common(sp, generator=True, op=True)
    building(sp)

    sp = sub.add_parser("pipeline", help="conditions, construction, verification and classification")
    common(sp, generator=True)
    building(sp)
    sp.add_argument("--workers", type=int)

    sp = sub.add_parser("search", help="enumerate admissible generators on a small lattice")
    common(sp, op=False)
    sp.add_argument("--anchors", type=_anchors)
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--denominators", type=_ints, default=(1,))
    sp.add_argument("--size-limit", type=int, default=8)
    sp.add_argument("--node-limit", type=int, default=200_000)
    sp.add_argument("--max-per-anchor", type=int)
    sp.add_argument("--catalog", type=Path, help="CSV file to append results to")
    sp.add_argument("--workers", type=int)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    kw["formats"] = tuple(ns.formats) if getattr(ns, "formats", None) else ("text",)
    if getattr(ns, "workers", None) is None:
        kw["workers"] = default_workers()
    return RunConfig(**kw)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (InputError, LatticeError, GeneratorError, ModeMismatch, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ConditionsNotMet as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONDITION
    except ConstructionError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
