"""Exhaustive axiom checks for operation tables, plus anchor-based classification.

Every check scans in element-id order and reports the lexicographically
first counterexample, so witnesses are deterministic for a given element
ordering.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .construct import OpTable
from .genfun import Status
from .lattice import FiniteLattice

AXIOMS = ("commutative", "associative", "monotone", "neutral-lower", "neutral-upper", "well-classified")


class Unclassifiable(ValueError):
    pass


@dataclass(frozen=True)
class AxiomEntry:
    axiom: str
    status: Status
    witness: tuple[int, ...] | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status is not Status.FAIL


@dataclass(frozen=True)
class AxiomReport:
    entries: tuple[AxiomEntry, ...]
    kind: str | None = None

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    def failed(self) -> list[str]:
        return [e.axiom for e in self.entries if not e.ok]

    def entry(self, axiom: str) -> AxiomEntry:
        for e in self.entries:
            if e.axiom == axiom:
                return e
        raise KeyError(axiom)


def _pass(axiom: str) -> AxiomEntry:
    return AxiomEntry(axiom, Status.PASS)


def _names(L: FiniteLattice, ids) -> str:
    return "(" + ", ".join(L.labels(ids)) + ")"


# ---------------------------------------------------------------------------


def check_commutative(T: OpTable) -> AxiomEntry:
    bad = np.argwhere(T.table != T.table.T)
    if len(bad) == 0:
        return _pass("commutative")
    x, y = (int(v) for v in bad[0])
    L = T.lattice
    return AxiomEntry(
        "commutative",
        Status.FAIL,
        (x, y),
        f"T{_names(L, (x, y))} = {L.label(T(x, y))} but T{_names(L, (y, x))} = {L.label(T(y, x))}",
    )


def _assoc_scan(table: np.ndarray, xs: range) -> tuple[int, int, int] | None:
    for x in xs:
        left = table[table[x]]  # left[y, z] = T(T(x, y), z)
        right = table[x][table]  # right[y, z] = T(x, T(y, z))
        bad = np.argwhere(left != right)
        if len(bad):
            return (x, int(bad[0][0]), int(bad[0][1]))
    return None


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("TWOUNINORM_WORKERS", "1")))
    except ValueError:
        return 1


def check_associative(T: OpTable, workers: int | None = None) -> AxiomEntry:
    """O(n^3) scan; ``workers`` > 1 splits the first coordinate across processes."""
    table = np.asarray(T.table)
    n = table.shape[0]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or n < 64:
        hit = _assoc_scan(table, range(n))
    else:
        step = -(-n // workers)
        chunks = [range(s, min(s + step, n)) for s in range(0, n, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(_assoc_scan, [table] * len(chunks), chunks))
        found = [h for h in hits if h is not None]
        hit = min(found) if found else None
    if hit is None:
        return _pass("associative")
    x, y, z = hit
    L = T.lattice
    xy, yz = T(x, y), T(y, z)
    return AxiomEntry(
        "associative",
        Status.FAIL,
        hit,
        f"T(T{_names(L, (x, y))}, {L.label(z)}) = {L.label(T(xy, z))} "
        f"but T({L.label(x)}, T{_names(L, (y, z))}) = {L.label(T(x, yz))}",
    )


def _monotone_scan(T: OpTable, table: np.ndarray) -> tuple[int, int, int] | None:
    leq = T.lattice.leq_matrix
    n = table.shape[0]
    for x in range(n):
        ys = np.flatnonzero(leq[x])
        ys = ys[ys != x]
        if len(ys) == 0:
            continue
        ok = leq[table[x][None, :], table[ys]]  # ok[k, z]: T(x,z) <= T(ys[k],z)
        bad = np.argwhere(~ok)
        if len(bad):
            k, z = bad[0]
            return (x, int(ys[k]), int(z))
    return None


def check_monotone(T: OpTable, commutative: bool | None = None) -> AxiomEntry:
    """x <= y must give T(x, z) <= T(y, z); incomparable outputs count as a
    violation.  The second argument is checked too unless the table is known
    to be commutative.  Witness (x, y, z) for the left argument, or
    (x, y, z) with a "right" detail for T(z, x) vs T(z, y)."""
    L = T.lattice
    table = np.asarray(T.table)
    hit = _monotone_scan(T, table)
    if hit is not None:
        x, y, z = hit
        return AxiomEntry(
            "monotone",
            Status.FAIL,
            hit,
            f"{L.label(x)} <= {L.label(y)} but T{_names(L, (x, z))} = {L.label(T(x, z))} "
            f"is not below T{_names(L, (y, z))} = {L.label(T(y, z))}",
        )
    if commutative is None:
        commutative = bool(np.array_equal(table, table.T))
    if not commutative:
        hit = _monotone_scan(T, table.T)
        if hit is not None:
            x, y, z = hit
            return AxiomEntry(
                "monotone",
                Status.FAIL,
                hit,
                f"right argument: {L.label(x)} <= {L.label(y)} but T{_names(L, (z, x))} = "
                f"{L.label(T(z, x))} is not below T{_names(L, (z, y))} = {L.label(T(z, y))}",
            )
    return _pass("monotone")


def check_neutral_sandwich(T: OpTable) -> tuple[AxiomEntry, AxiomEntry]:
    L = T.lattice
    out = []
    for axiom, e, region in (
        ("neutral-lower", T.e1, L.leq_matrix[:, T.a]),
        ("neutral-upper", T.e2, L.leq_matrix[T.a]),
    ):
        xs = np.flatnonzero(region)
        bad = xs[T.table[e, xs] != xs]
        if len(bad):
            x = int(bad[0])
            out.append(
                AxiomEntry(axiom, Status.FAIL, (e, x), f"T{_names(L, (e, x))} = {L.label(T(e, x))}")
            )
        else:
            out.append(_pass(axiom))
    return out[0], out[1]


def recheck(T: OpTable, entry: AxiomEntry) -> bool:
    """Re-evaluate a failure witness directly on the table."""
    if entry.witness is None:
        return False
    L, w = T.lattice, entry.witness
    if entry.axiom == "commutative":
        x, y = w
        return T(x, y) != T(y, x)
    if entry.axiom == "associative":
        x, y, z = w
        return T(T(x, y), z) != T(x, T(y, z))
    if entry.axiom == "monotone":
        x, y, z = w
        if not L.leq(x, y):
            return False
        if entry.detail.startswith("right argument"):
            return not L.leq(T(z, x), T(z, y))
        return not L.leq(T(x, z), T(y, z))
    if entry.axiom in ("neutral-lower", "neutral-upper"):
        e, x = w
        return T(e, x) != x
    return False


# ---------------------------------------------------------------------------
# classification


def kind_from_anchors(L: FiniteLattice, e1: int, a: int, e2: int) -> str:
    bot, top = L.bottom, L.top
    if (a == top and e1 == top) or (a == bot and e2 == top):
        return "t-norm"
    if (a == top and e1 == bot) or (a == bot and e2 == bot):
        return "t-conorm"
    if a in (bot, top):
        return "uninorm"
    if e1 == bot and e2 == top:
        return "nullnorm"
    if e2 == top:
        return "uni-nullnorm"
    if e1 == bot:
        return "null-uninorm"
    return "2-uninorm"


def _spot_check(T: OpTable, kind: str) -> str | None:
    """Definitional identities of ``kind``; returns a complaint or None."""
    L = T.lattice
    tab = T.table
    every = np.arange(L.size)

    def neutral(e: int, xs: np.ndarray) -> bool:
        return bool((tab[e, xs] == xs).all())

    if kind in ("t-norm", "t-conorm", "uninorm"):
        e = T.e1 if T.a == L.top else T.e2
        if not neutral(e, every):
            return f"{L.label(e)} is not neutral on the whole lattice"
        if kind == "t-norm" and e != L.top:
            return "t-norm neutral element is not top"
        if kind == "t-conorm" and e != L.bottom:
            return "t-conorm neutral element is not bottom"
    if kind in ("nullnorm", "null-uninorm"):
        below = np.flatnonzero(L.leq_matrix[:, T.a])
        if not neutral(L.bottom, below):
            return "bottom is not neutral below a"
    if kind in ("nullnorm", "uni-nullnorm"):
        above = np.flatnonzero(L.leq_matrix[T.a])
        if not neutral(L.top, above):
            return "top is not neutral above a"
    return None


def classify(T: OpTable, report: AxiomReport | None = None) -> str:
    """Most specific kind for a table whose axiom checks pass."""
    if report is None:
        report = _axiom_entries(T)
    failed = [e.axiom for e in report.entries if not e.ok and e.axiom != "well-classified"]
    if failed:
        raise Unclassifiable(f"table fails {failed}")
    kind = kind_from_anchors(T.lattice, *T.anchors)
    problem = _spot_check(T, kind)
    if problem is not None:
        raise Unclassifiable(f"anchors suggest {kind}, but {problem}")
    return kind


def _axiom_entries(T: OpTable, workers: int | None = None) -> AxiomReport:
    comm = check_commutative(T)
    entries = [
        comm,
        check_associative(T, workers),
        check_monotone(T, commutative=comm.ok),
        *check_neutral_sandwich(T),
    ]
    return AxiomReport(tuple(entries))


def verify_full(T: OpTable, workers: int | None = None) -> AxiomReport:
    base = _axiom_entries(T, workers)
    if not base.passed:
        entry = AxiomEntry("well-classified", Status.NOT_APPLICABLE, detail="axioms failed")
        return AxiomReport(base.entries + (entry,))
    try:
        kind = classify(T, base)
    except Unclassifiable as exc:
        entry = AxiomEntry("well-classified", Status.FAIL, T.anchors, str(exc))
        return AxiomReport(base.entries + (entry,))
    entry = AxiomEntry("well-classified", Status.PASS, detail=kind)
    return AxiomReport(base.entries + (entry,), kind)
