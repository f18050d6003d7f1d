"""Finite bounded lattices given by their cover (Hasse) relation.

Elements are addressed by integer ids, which are indices into
``FiniteLattice.elements``.  The order relation and the meet/join tables are
dense numpy matrices computed once at construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


class LatticeError(ValueError):
    """Raised when a lattice description is malformed or not a lattice."""


class CycleError(LatticeError):
    def __init__(self, x: str, y: str):
        super().__init__(f"cover relation has a cycle through {x!r} and {y!r}")
        self.pair = (x, y)


class NotALattice(LatticeError):
    def __init__(self, x: str, y: str, missing: str):
        super().__init__(f"elements {x!r} and {y!r} have no unique {missing}")
        self.pair = (x, y)
        self.missing = missing


class BoundError(LatticeError):
    pass


class EmptyIntervalError(LatticeError):
    pass


def _closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure (Warshall) of a boolean relation."""
    closed = rel.copy()
    np.fill_diagonal(closed, True)
    for k in range(closed.shape[0]):
        closed |= closed[:, k, None] & closed[None, k, :]
    return closed


def _bound_table(leq: np.ndarray, lower: bool) -> tuple[np.ndarray, tuple[int, int] | None]:
    """Meet (lower=True) or join table by brute force over common bounds.

    Returns the table and, if some pair has no unique bound, the first such
    pair in id order.
    """
    n = leq.shape[0]
    # below[z, x] is True when z <= x (resp. z >= x for joins)
    below = leq if lower else leq.T
    size = below.sum(axis=0)  # number of elements under (over) each z
    table = np.empty((n, n), dtype=np.intp)
    bad: tuple[int, int] | None = None
    for x in range(n):
        common = below[:, x, None] & below  # common[z, y]
        scored = np.where(common, size[:, None], -1)
        cand = scored.argmax(axis=0)
        ok = common[cand, np.arange(n)] & ~(common & ~below[:, cand]).any(axis=0)
        table[x] = cand
        if bad is None and not ok.all():
            bad = (x, int(np.flatnonzero(~ok)[0]))
    return table, bad


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """A validated finite bounded lattice.

    Build instances with :meth:`from_covers` or :func:`parse_lattice`; the
    constructor trusts its arguments.
    """

    elements: tuple[str, ...]
    leq_matrix: np.ndarray
    meet_table: np.ndarray
    join_table: np.ndarray
    bottom: int
    top: int
    index: Mapping[str, int] = field(repr=False)

    @classmethod
    def from_covers(
        cls,
        elements: Sequence[str],
        covers: Iterable[tuple[str, str]],
        bottom: str,
        top: str,
    ) -> "FiniteLattice":
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            dupes = sorted({e for e in elements if elements.count(e) > 1})
            raise LatticeError(f"duplicate element labels: {dupes}")
        if not elements:
            raise LatticeError("a lattice needs at least one element")
        index = {label: i for i, label in enumerate(elements)}
        n = len(elements)
        rel = np.zeros((n, n), dtype=bool)
        for lo, hi in covers:
            for label in (lo, hi):
                if label not in index:
                    raise LatticeError(f"cover edge mentions unknown element {label!r}")
            if lo == hi:
                raise CycleError(lo, hi)
            rel[index[lo], index[hi]] = True

        leq = _closure(rel)
        both = leq & leq.T
        np.fill_diagonal(both, False)
        if both.any():
            x, y = np.argwhere(both)[0]
            raise CycleError(elements[x], elements[y])

        for label in (bottom, top):
            if label not in index:
                raise BoundError(f"declared bound {label!r} is not an element")
        b, t = index[bottom], index[top]
        if not leq[b].all():
            stray = elements[int(np.flatnonzero(~leq[b])[0])]
            raise BoundError(f"{bottom!r} is not below {stray!r}")
        if not leq[:, t].all():
            stray = elements[int(np.flatnonzero(~leq[:, t])[0])]
            raise BoundError(f"{top!r} is not above {stray!r}")

        meet, bad = _bound_table(leq, lower=True)
        if bad is not None:
            raise NotALattice(elements[bad[0]], elements[bad[1]], "meet")
        join, bad = _bound_table(leq, lower=False)
        if bad is not None:
            raise NotALattice(elements[bad[0]], elements[bad[1]], "join")

        for arr in (leq, meet, join):
            arr.setflags(write=False)
        return cls(elements, leq, meet, join, b, t, index)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def id(self, label: str | int) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < len(self.elements):
                raise KeyError(label)
            return int(label)
        try:
            return self.index[label]
        except KeyError:
            raise KeyError(f"unknown element {label!r}") from None

    def label(self, x: int) -> str:
        return self.elements[x]

    def labels(self, ids: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.elements[i] for i in ids)

    def leq(self, x: int, y: int) -> bool:
        return bool(self.leq_matrix[x, y])

    def lt(self, x: int, y: int) -> bool:
        return x != y and bool(self.leq_matrix[x, y])

    def comparable(self, x: int, y: int) -> bool:
        return bool(self.leq_matrix[x, y] or self.leq_matrix[y, x])

    def incomparable(self, x: int, y: int) -> bool:
        return not self.comparable(x, y)

    def meet(self, x: int, y: int) -> int:
        return int(self.meet_table[x, y])

    def join(self, x: int, y: int) -> int:
        return int(self.join_table[x, y])

    def meet_all(self, ids: Iterable[int]) -> int:
        """Infimum of a set of elements; the infimum of the empty set is top."""
        return reduce(self.meet, ids, self.top)

    def join_all(self, ids: Iterable[int]) -> int:
        """Supremum of a set of elements; the supremum of the empty set is bottom."""
        return reduce(self.join, ids, self.bottom)

    def incomparable_mask(self, a: int) -> np.ndarray:
        return ~(self.leq_matrix[a] | self.leq_matrix[:, a])

    def incomparable_set(self, a: int) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.incomparable_mask(a)))

    def interval(self, lo: int, hi: int) -> frozenset[int]:
        if not self.leq_matrix[lo, hi]:
            raise EmptyIntervalError(
                f"[{self.elements[lo]}, {self.elements[hi]}] is empty: lower end is not below upper end"
            )
        mask = self.leq_matrix[lo] & self.leq_matrix[:, hi]
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def is_chain(self) -> bool:
        return bool((self.leq_matrix | self.leq_matrix.T).all())

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Hasse edges (x, y) with x covered by y, sorted by id."""
        lt = self.leq_matrix.copy()
        np.fill_diagonal(lt, False)
        through = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        return [(int(x), int(y)) for x, y in np.argwhere(lt & ~through)]

    def to_spec(self) -> dict:
        """Normalized description: covers only, sorted by element id."""
        return {
            "elements": list(self.elements),
            "covers": [[self.elements[x], self.elements[y]] for x, y in self.cover_pairs()],
            "bottom": self.elements[self.bottom],
            "top": self.elements[self.top],
        }


def parse_lattice(spec: Mapping) -> FiniteLattice:
    """Build a lattice from a ``{"elements", "covers", "bottom", "top"}`` mapping."""
    try:
        elements = spec["elements"]
        covers = spec["covers"]
        bottom = spec["bottom"]
        top = spec["top"]
    except (KeyError, TypeError) as exc:
        raise LatticeError(f"lattice spec is missing field {exc}") from None
    if not all(isinstance(e, str) for e in elements):
        raise LatticeError("element labels must be strings")
    pairs = []
    for edge in covers:
        if len(edge) != 2:
            raise LatticeError(f"cover edge must be a [lower, upper] pair, got {edge!r}")
        pairs.append((edge[0], edge[1]))
    return FiniteLattice.from_covers(elements, pairs, bottom, top)


def load_lattice(path: str | Path) -> FiniteLattice:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LatticeError(f"{path}: not valid JSON ({exc})") from None
    return parse_lattice(doc)


def chain(labels: Sequence[str]) -> FiniteLattice:
    """Convenience constructor for a totally ordered lattice."""
    return FiniteLattice.from_covers(labels, zip(labels, labels[1:]), labels[0], labels[-1])
