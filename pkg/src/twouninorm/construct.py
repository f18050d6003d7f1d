"""Operation tables built from additive generators.

Three independent routes produce a table from a generator:

* :func:`construct_2uninorm` - the five-branch piecewise rule (increasing
  generators) or its mirror image (decreasing generators);
* :func:`construct_variant` - the reduced rules for the degenerate anchor
  placements (uni-nullnorm, null-uninorm, nullnorm, uninorm, t-norm,
  t-conorm);
* :func:`construct_alt_form` - the alternative case split written in terms
  of x, y, a, bottom and exact inverses.

They are deliberately written out separately so that whole-table equality
between them is a meaningful cross-check.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .genfun import (
    ConditionReport,
    Generator,
    IndeterminateSum,
    check_conditions,
    ext_add,
    pseudo_inverse_flagged,
)
from .lattice import FiniteLattice


class ConstructionError(RuntimeError):
    pass


class ConditionsNotMet(ConstructionError):
    def __init__(self, report: ConditionReport):
        super().__init__(f"generator fails conditions {report.failed()} ({report.mode} mode)")
        self.report = report


class BoundaryConflict(ConstructionError):
    """Two matching branches of the piecewise rule disagree on a cell."""


class KindMismatch(ConstructionError):
    pass


KINDS = ("uni-nullnorm", "null-uninorm", "nullnorm", "uninorm", "t-norm", "t-conorm")


@dataclass(frozen=True, eq=False)
class OpTable:
    """A total binary operation on a lattice, stored as a dense id matrix."""

    lattice: FiniteLattice
    table: np.ndarray
    e1: int
    a: int
    e2: int
    provenance: str = "external"
    branches: np.ndarray | None = field(default=None, repr=False)
    empty_convention: np.ndarray | None = field(default=None, repr=False)

    @property
    def anchors(self) -> tuple[int, int, int]:
        return (self.e1, self.a, self.e2)

    def __call__(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def same_cells(self, other: "OpTable") -> bool:
        return self.lattice is other.lattice and np.array_equal(self.table, other.table)

    def first_difference(self, other: "OpTable") -> tuple[int, int] | None:
        diff = np.argwhere(self.table != other.table)
        return None if len(diff) == 0 else (int(diff[0][0]), int(diff[0][1]))

    def label_rows(self) -> list[list[str]]:
        names = self.lattice.elements
        return [[names[c] for c in row] for row in self.table]

    # serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        L = self.lattice
        doc = {
            "elements": list(L.elements),
            "anchors": {"e1": L.label(self.e1), "a": L.label(self.a), "e2": L.label(self.e2)},
            "provenance": self.provenance,
            "table": self.label_rows(),
        }
        if self.branches is not None:
            doc["branches"] = self.branches.tolist()
        if self.empty_convention is not None and self.empty_convention.any():
            doc["empty_convention_cells"] = [
                [L.label(int(x)), L.label(int(y))] for x, y in np.argwhere(self.empty_convention)
            ]
        return doc

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["op", *self.lattice.elements])
        for name, row in zip(self.lattice.elements, self.label_rows()):
            w.writerow([name, *row])
        return buf.getvalue()

    def to_text(self) -> str:
        names = self.lattice.elements
        rows = self.label_rows()
        head = ["U", *names]
        width = max(len(s) for s in head + [c for r in rows for c in r])
        lines = [
            " ".join(s.rjust(width) for s in head[:1]) + " | " + " ".join(s.rjust(width) for s in head[1:])
        ]
        lines.append("-" * len(lines[0]))
        for name, row in zip(names, rows):
            lines.append(name.rjust(width) + " | " + " ".join(c.rjust(width) for c in row))
        return "\n".join(lines) + "\n"


def optable_from_json(L: FiniteLattice, doc: Mapping, anchors: Sequence[str] | None = None) -> OpTable:
    """Read a table in the structured format written by :meth:`OpTable.to_json`.

    Rows and columns follow ``doc["elements"]`` when present (which must be a
    permutation of the lattice's labels), else the lattice's own order.
    """
    order = list(doc.get("elements", L.elements))
    if sorted(order) != sorted(L.elements):
        raise ValueError("table elements do not match the lattice's elements")
    rows = doc["table"]
    n = L.size
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"table must be {n}x{n}")
    perm = [L.id(name) for name in order]
    table = np.empty((n, n), dtype=np.intp)
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            table[perm[i], perm[j]] = L.id(cell)
    if anchors is None:
        spec = doc.get("anchors")
        if spec is None:
            raise ValueError("no anchors in the table file; pass them explicitly")
        anchors = (spec["e1"], spec["a"], spec["e2"])
    e1, a, e2 = (L.id(x) for x in anchors)
    table.setflags(write=False)
    return OpTable(L, table, e1, a, e2, provenance=doc.get("provenance", "external"))


def optable_from_function(
    L: FiniteLattice, op: Callable[[int, int], int], anchors: tuple[int, int, int], provenance: str = "external"
) -> OpTable:
    n = L.size
    table = np.array([[op(x, y) for y in range(n)] for x in range(n)], dtype=np.intp)
    table.setflags(write=False)
    return OpTable(L, table, *anchors, provenance=provenance)


# ---------------------------------------------------------------------------
# shared machinery


class _Cells:
    """Pseudo-inverse cache and table assembly for one generator."""

    POS = float("inf")

    def __init__(self, G: Generator):
        self.G = G
        self.f = G.values
        self.fa = G.values[G.a]
        self.fe2 = G.values[G.e2]
        self.f0 = G.values[G.lattice.bottom]
        self._pinv: dict = {}
        self.used_empty = False

    def pinv(self, y) -> int:
        hit = self._pinv.get(y)
        if hit is None:
            hit = self._pinv[y] = pseudo_inverse_flagged(self.G, y)
        self.used_empty = self.used_empty or hit[1]
        return hit[0]

    def add(self, x: int, y: int):
        try:
            return ext_add(self.f[x], self.f[y])
        except IndeterminateSum as exc:
            raise ConstructionError(f"internal error: indeterminate sum at cell {(x, y)}: {exc}") from exc

    def build(self, cell: Callable[[int, int], tuple[int, int]], provenance: str) -> OpTable:
        G, L = self.G, self.G.lattice
        n = L.size
        table = np.empty((n, n), dtype=np.intp)
        branches = np.empty((n, n), dtype=np.int8)
        empty = np.zeros((n, n), dtype=bool)
        for x in range(n):
            for y in range(n):
                self.used_empty = False
                branch, value = cell(x, y)
                table[x, y] = value
                branches[x, y] = branch
                empty[x, y] = self.used_empty
        for arr in (table, branches, empty):
            arr.setflags(write=False)
        return OpTable(L, table, G.e1, G.a, G.e2, provenance, branches, empty)


def _enforce(G: Generator, mode: str, override: bool) -> None:
    if override:
        return
    report = check_conditions(G, mode)
    if not report.passed:
        raise ConditionsNotMet(report)


# ---------------------------------------------------------------------------
# the general rule


def _general_increasing(c: _Cells, x: int, y: int) -> list[tuple[int, int]]:
    G = c.G
    fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
    hits = []
    if fx <= 0 and fy <= 0:
        hits.append((1, c.pinv(c.add(x, y))))
    low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
    if low_x and low_y and not G.in_Ia[x] and not G.in_Ia[y]:
        hits.append((2, c.pinv(min(c.add(x, y), fa))))
    if (
        (fx > fa and low_y)
        or (low_x and fy > fa)
        or (low_x and G.in_band(y))
        or (G.in_band(x) and low_y)
    ):
        hits.append((3, G.a))
    mid_x, mid_y = fa < fx <= fe2, fa < fy <= fe2
    if (fx > fe2 and fy > fe2) or (fx > fe2 and mid_y) or (mid_x and fy > fe2):
        hits.append((4, c.pinv(max(fx, fy))))
    return hits


def _general_decreasing(c: _Cells, x: int, y: int) -> list[tuple[int, int]]:
    G = c.G
    fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
    hits = []
    if fx >= 0 and fy >= 0:
        hits.append((1, c.pinv(c.add(x, y))))
    low_x, low_y = fa <= fx <= 0, fa <= fy <= 0
    if low_x and low_y and not G.in_Ia[x] and not G.in_Ia[y]:
        hits.append((2, c.pinv(max(c.add(x, y), fa))))
    if (
        (fx < fa and low_y)
        or (low_x and fy < fa)
        or (low_x and G.in_band(y))
        or (G.in_band(x) and low_y)
    ):
        hits.append((3, G.a))
    mid_x, mid_y = fe2 <= fx < fa, fe2 <= fy < fa
    if (fx < fe2 and fy < fe2) or (fx < fe2 and mid_y) or (mid_x and fy < fe2):
        hits.append((4, c.pinv(min(fx, fy))))
    return hits


def construct_2uninorm(G: Generator, *, override: bool = False, check_boundaries: bool = True) -> OpTable:
    """Build the operation of the general five-branch rule.

    Branches are tried in order and the first match wins.  With
    ``check_boundaries`` every matching branch is evaluated and any
    disagreement raises :class:`BoundaryConflict`.
    """
    _enforce(G, "full", override)
    c = _Cells(G)
    general = _general_increasing if G.increasing else _general_decreasing
    L = G.lattice

    def cell(x: int, y: int) -> tuple[int, int]:
        hits = general(c, x, y)
        if not hits:
            fx, fy = c.f[x], c.f[y]
            pick = min(fx, fy) if G.increasing else max(fx, fy)
            return 5, c.pinv(pick)
        if check_boundaries and len({v for _, v in hits}) > 1:
            detail = ", ".join(f"branch {b} -> {L.label(v)}" for b, v in hits)
            raise BoundaryConflict(f"cell ({L.label(x)}, {L.label(y)}): {detail}")
        return hits[0]

    return c.build(cell, "eq3" if G.increasing else "eq4")


# ---------------------------------------------------------------------------
# corollary formulas


def _variant_precondition(G: Generator, kind: str) -> str:
    """Check anchors against ``kind``; return the condition mode to enforce."""
    L = G.lattice
    bot, top = L.bottom, L.top
    e1, a, e2 = G.anchors
    if kind == "uni-nullnorm":
        ok, mode = e2 == top, "full"
    elif kind == "null-uninorm":
        ok, mode = e1 == bot, "relaxed-iv'" if G.increasing else "relaxed-iv''"
    elif kind == "nullnorm":
        ok, mode = e1 == bot and e2 == top, "relaxed-iv'" if G.increasing else "relaxed-iv''"
    elif kind == "uninorm":
        ok, mode = a == top, "uninorm"
    elif kind == "t-norm":
        ok, mode = a == top and e1 == top, "uninorm"
    elif kind == "t-conorm":
        ok, mode = a == top and e1 == bot, "uninorm"
    else:
        raise KindMismatch(f"unknown kind {kind!r}; choose from {KINDS}")
    if not ok:
        raise KindMismatch(f"anchors {L.labels(G.anchors)} do not fit a {kind}")
    return mode


def _uni_nullnorm(c: _Cells, x: int, y: int) -> tuple[int, int]:
    G = c.G
    fx, fy, fa = c.f[x], c.f[y], c.fa
    if G.increasing:
        if fx <= 0 and fy <= 0:
            return 1, c.pinv(c.add(x, y))
        low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
        if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
            return 2, c.pinv(min(c.add(x, y), fa))
        high_x, high_y = fa <= fx < c.POS, fa <= fy < c.POS
        if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
            return 3, G.a
        return 5, c.pinv(min(fx, fy))
    if fx > 0 and fy > 0:
        return 1, c.pinv(c.add(x, y))
    low_x, low_y = fa <= fx <= 0, fa <= fy <= 0
    if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
        return 2, c.pinv(max(c.add(x, y), fa))
    high_x, high_y = fx < fa, fy < fa
    if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
        return 3, G.a
    return 5, c.pinv(max(fx, fy))


def _null_uninorm(c: _Cells, x: int, y: int) -> tuple[int, int]:
    G = c.G
    fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
    if G.increasing:
        low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
        if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
            return 2, c.pinv(min(c.add(x, y), fa))
        high_x, high_y = fa <= fx < c.POS, fa <= fy < c.POS
        if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
            return 3, G.a
        if fa <= fx <= fe2 and fa <= fy <= fe2:
            return 5, c.pinv(min(fx, fy))
        return 4, c.pinv(max(fx, fy))
    low_x, low_y = fa <= fx <= 0, fa <= fy <= 0
    if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
        return 2, c.pinv(max(c.add(x, y), fa))
    high_x, high_y = fx < fa, fy < fa
    if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
        return 3, G.a
    if fe2 <= fx <= fa and fe2 <= fy <= fa:
        return 5, c.pinv(max(fx, fy))
    return 4, c.pinv(min(fx, fy))


def _nullnorm(c: _Cells, x: int, y: int) -> tuple[int, int]:
    G = c.G
    fx, fy, fa = c.f[x], c.f[y], c.fa
    if G.increasing:
        low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
        if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
            return 2, c.pinv(min(c.add(x, y), fa))
        high_x, high_y = fa <= fx < c.POS, fa <= fy < c.POS
        if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
            return 3, G.a
        return 5, c.pinv(min(fx, fy))
    low_x, low_y = fa <= fx <= 0, fa <= fy <= 0
    if low_x and low_y and not (G.in_Ia[x] or G.in_Ia[y]):
        return 2, c.pinv(max(c.add(x, y), fa))
    high_x, high_y = fx < fa, fy < fa
    if (high_x and low_y) or (low_x and high_y) or (low_x and G.in_band(y)) or (G.in_band(x) and low_y):
        return 3, G.a
    return 5, c.pinv(max(fx, fy))


def _uninorm(c: _Cells, x: int, y: int) -> tuple[int, int]:
    fx, fy = c.f[x], c.f[y]
    if (fx <= 0 and fy <= 0) or (fx >= 0 and fy >= 0):
        return 1, c.pinv(c.add(x, y))
    if c.G.increasing:
        return 5, c.pinv(min(fx, fy))
    return 5, c.pinv(max(fx, fy))


_VARIANTS = {
    "uni-nullnorm": _uni_nullnorm,
    "null-uninorm": _null_uninorm,
    "nullnorm": _nullnorm,
    "uninorm": _uninorm,
    "t-norm": _uninorm,
    "t-conorm": _uninorm,
}


def construct_variant(G: Generator, kind: str, *, override: bool = False) -> OpTable:
    """Build one of the degenerate-anchor specializations from its own rule."""
    mode = _variant_precondition(G, kind)
    _enforce(G, mode, override)
    c = _Cells(G)
    rule = _VARIANTS[kind]
    return c.build(lambda x, y: rule(c, x, y), f"variant:{kind}")


# ---------------------------------------------------------------------------
# alternative closed form


def _alt_increasing(c: _Cells, x: int, y: int) -> tuple[int, int] | None:
    G, L = c.G, c.G.lattice
    fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
    neg = fx <= 0 and fy <= 0
    low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
    s = c.add(x, y) if (neg or (low_x and low_y)) else None
    if neg and G.in_range(s):
        return 1, G.preimage[s]
    if low_x and low_y and s <= fa and G.in_range(s) and not (G.in_Ia[x] or G.in_Ia[y]):
        return 2, G.preimage[s]
    if neg and s < c.f0:
        return 1, L.bottom
    if (
        (low_x and low_y and s >= fa)
        or (fx >= fa and low_y)
        or (low_x and fy >= fa)
        or (low_x and G.in_band(y))
        or (G.in_band(x) and low_y)
    ):
        return 3, G.a
    in_mid_x, in_mid_y = fa <= fx <= fe2, fa <= fy <= fe2
    if (
        (fx <= 0 <= fy)
        or (fx > fe2 and in_mid_y)
        or (in_mid_x and in_mid_y and fx <= fy)
        or (fx >= fe2 and fy >= fe2 and fx >= fy)
    ):
        return 6, x
    if (
        (fy <= 0 <= fx)
        or (in_mid_x and fy > fe2)
        or (in_mid_x and in_mid_y and fx >= fy)
        or (fx >= fe2 and fy >= fe2 and fx <= fy)
    ):
        return 7, y
    return None


def _alt_decreasing(c: _Cells, x: int, y: int) -> tuple[int, int] | None:
    G, L = c.G, c.G.lattice
    fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
    pos = fx >= 0 and fy >= 0
    low_x, low_y = fa <= fx <= 0, fa <= fy <= 0
    s = c.add(x, y) if (pos or (low_x and low_y)) else None
    if pos and G.in_range(s):
        return 1, G.preimage[s]
    if low_x and low_y and s >= fa and G.in_range(s) and not (G.in_Ia[x] or G.in_Ia[y]):
        return 2, G.preimage[s]
    if pos and s > c.f0:
        return 1, L.bottom
    if (
        (low_x and low_y and s <= fa)
        or (fx <= fa and low_y)
        or (low_x and fy <= fa)
        or (low_x and G.in_band(y))
        or (G.in_band(x) and low_y)
    ):
        return 3, G.a
    in_mid_x, in_mid_y = fe2 <= fx <= fa, fe2 <= fy <= fa
    if (
        (fx >= 0 >= fy)
        or (fx < fe2 and in_mid_y)
        or (in_mid_x and in_mid_y and fx >= fy)
        or (fx <= fe2 and fy <= fe2 and fx <= fy)
    ):
        return 6, x
    if (
        (fy >= 0 >= fx)
        or (in_mid_x and fy < fe2)
        or (in_mid_x and in_mid_y and fx <= fy)
        or (fx <= fe2 and fy <= fe2 and fx >= fy)
    ):
        return 7, y
    return None


def construct_alt_form(G: Generator, *, override: bool = False) -> OpTable:
    """Build the table from the alternative case split (first match wins)."""
    _enforce(G, "full", override)
    c = _Cells(G)
    rule = _alt_increasing if G.increasing else _alt_decreasing
    L = G.lattice

    def cell(x: int, y: int) -> tuple[int, int]:
        hit = rule(c, x, y)
        if hit is None:
            raise ConstructionError(
                f"alternative form has no case for ({L.label(x)}, {L.label(y)}); "
                "the generator probably fails condition (i)"
            )
        return hit

    return c.build(cell, "alt-form")


def construct_chain_form(G: Generator, *, override: bool = False) -> OpTable:
    """Four-branch rule for totally ordered lattices (increasing generators)."""
    if not G.lattice.is_chain():
        raise KindMismatch("the chain rule needs a totally ordered lattice")
    if not G.increasing:
        raise KindMismatch("the chain rule is stated for increasing generators")
    _enforce(G, "chain", override)
    c = _Cells(G)

    def cell(x: int, y: int) -> tuple[int, int]:
        fx, fy, fa, fe2 = c.f[x], c.f[y], c.fa, c.fe2
        low_x, low_y = 0 <= fx <= fa, 0 <= fy <= fa
        if (fx <= 0 and fy <= 0) or (low_x and low_y):
            return 2, c.pinv(min(c.add(x, y), fa))
        if (fx > fa and low_y) or (low_x and fy > fa):
            return 3, G.a
        mid_x, mid_y = fa < fx <= fe2, fa < fy <= fe2
        if (fx > fe2 and fy > fe2) or (fx > fe2 and mid_y) or (mid_x and fy > fe2):
            return 4, c.pinv(max(fx, fy))
        return 5, c.pinv(min(fx, fy))

    return c.build(cell, "chain-form")


def write_table(T: OpTable, fmt: str) -> str:
    if fmt == "text":
        return T.to_text()
    if fmt == "csv":
        return T.to_csv()
    if fmt == "json":
        return json.dumps(T.to_json(), indent=1) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")
