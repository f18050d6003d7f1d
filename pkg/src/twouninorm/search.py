"""Backtracking search for admissible generators on small lattices.

Values come from the grid {k/d : |k/d| <= bound, d in denominators}.  The
search assigns elements in a fixed linear extension, so monotonicity and
injectivity are local checks; condition (i) is pruned incrementally and the
remaining conditions are checked on complete assignments.  Every emitted
generator is then pushed through the whole pipeline (construction, axiom
verification, duality and the alternative form) before it is reported.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .construct import ConstructionError, construct_2uninorm, construct_alt_form
from .genfun import Direction, Generator, check_conditions, format_ext, load_generator
from .lattice import FiniteLattice
from .verify import verify_full


class SearchRefused(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, result: "SearchResult"):
        super().__init__(f"node limit reached after {result.nodes} nodes; results are partial")
        self.result = result


@dataclass
class Finding:
    generator: Generator
    kind: str | None
    problems: list[str] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.problems


@dataclass
class SearchResult:
    findings: list[Finding]
    nodes: int
    partial: bool

    @property
    def generators(self) -> list[Generator]:
        return [f.generator for f in self.findings]

    @property
    def counterexamples(self) -> list[Finding]:
        return [f for f in self.findings if not f.sound]


def value_grid(bound: int, denominators: Sequence[int] = (1,)) -> list[Fraction]:
    if bound <= 0:
        raise ValueError("search bound must be positive")
    vals = {Fraction(k, d) for d in denominators for k in range(-bound * d, bound * d + 1)}
    return sorted(vals)


def anchor_triples(L: FiniteLattice) -> list[tuple[int, int, int]]:
    """All e1 <= a <= e2, minus the a = e2 < top placements.

    With a = e2 below top the piecewise rule sends T(a, x) to a for x above
    a, which breaks neutrality of e2 there; those triples never produce a
    2-uninorm and are skipped.
    """
    leq = L.leq_matrix
    out = []
    for e1 in range(L.size):
        for a in np.flatnonzero(leq[e1]):
            for e2 in np.flatnonzero(leq[a]):
                if a == e2 and e2 != L.top:
                    continue
                out.append((e1, int(a), int(e2)))
    return out


def _linear_extension(L: FiniteLattice) -> list[int]:
    depth = L.leq_matrix.sum(axis=0)  # size of each down-set
    return sorted(range(L.size), key=lambda x: (int(depth[x]), x))


class _Search:
    def __init__(
        self,
        L: FiniteLattice,
        anchors: tuple[int, int, int],
        grid: list[Fraction],
        max_results: int | None,
        node_limit: int,
    ):
        self.L = L
        self.e1, self.a, self.e2 = anchors
        self.grid = grid
        self.grid_set = set(grid)
        self.order = _linear_extension(L)
        self.lower = [np.flatnonzero(L.leq_matrix[:, x]) for x in range(L.size)]
        self.max_results = max_results
        self.node_limit = node_limit
        self.nodes = 0
        self.partial = False
        self.found: list[Generator] = []

    def run(self) -> None:
        values: list[Fraction | None] = [None] * self.L.size
        self._extend(values, 0, set())

    def _candidates(self, values, x):
        floor = max((values[y] for y in self.lower[x] if y != x), default=None)
        if x == self.e1:
            if floor is None or floor < 0:
                yield Fraction(0)
            return
        for v in self.grid:
            if floor is not None and v <= floor:
                continue
            yield v

    def _cond_i_ok(self, values, x) -> bool:
        fa = values[self.a]
        f0 = values[self.L.bottom]
        if fa is None or f0 is None:
            return True
        assigned = [y for y in range(self.L.size) if values[y] is not None]
        rng = {values[y] for y in assigned}
        free = self.L.size - len(assigned)
        vx = values[x]
        pool = [x] if x != self.a else assigned
        for p in pool:
            vp = values[p]
            for y in assigned:
                vy = values[y]
                if (vp <= 0 and vy <= 0) or (0 <= vp <= fa and 0 <= vy <= fa):
                    need = min(vp + vy, fa)
                    if need < f0 or need in rng:
                        continue
                    if free == 0 or need not in self.grid_set:
                        return False
        del vx
        return True

    def _extend(self, values, depth, used) -> bool:
        """Returns False to stop the whole search."""
        if depth == len(self.order):
            self._emit(values)
            return self.max_results is None or len(self.found) < self.max_results
        x = self.order[depth]
        for v in self._candidates(values, x):
            if v in used:
                continue
            self.nodes += 1
            if self.nodes > self.node_limit:
                self.partial = True
                return False
            values[x] = v
            if self._cond_i_ok(values, x):
                used.add(v)
                keep_going = self._extend(values, depth + 1, used)
                used.discard(v)
                if not keep_going:
                    values[x] = None
                    return False
            values[x] = None
        return True

    def _emit(self, values) -> None:
        if not values[self.e1] <= values[self.a] <= values[self.e2]:
            return
        G = load_generator(self.L, dict(enumerate(values)), Direction.INCREASING, self.e1, self.a, self.e2)
        if check_conditions(G, "full").passed:
            self.found.append(G)


def validate(G: Generator) -> Finding:
    """Push an admissible generator through every cross-check."""
    problems = []
    try:
        T = construct_2uninorm(G)
    except ConstructionError as exc:
        return Finding(G, None, [f"construction: {exc}"])
    report = verify_full(T, workers=1)
    if not report.passed:
        problems.append(f"axioms fail: {report.failed()}")
    try:
        if not construct_alt_form(G).same_cells(T):
            problems.append("alternative form differs")
    except ConstructionError as exc:
        problems.append(f"alternative form: {exc}")
    try:
        D = G.negated()
        if not check_conditions(D, "full").passed:
            problems.append("negated generator fails the mirrored conditions")
        elif not construct_2uninorm(D).same_cells(T):
            problems.append("decreasing build of the negated generator differs")
    except ConstructionError as exc:
        problems.append(f"duality: {exc}")
    return Finding(G, report.kind, problems)


def _search_one(L, anchors, grid, max_results, node_limit):
    s = _Search(L, anchors, grid, max_results, node_limit)
    s.run()
    return s.found, s.nodes, s.partial


def search(
    L: FiniteLattice,
    anchors: Iterable[tuple[int, int, int]] | None = None,
    *,
    bound: int = 3,
    denominators: Sequence[int] = (1,),
    max_per_anchor: int | None = None,
    node_limit: int = 200_000,
    size_limit: int = 8,
    workers: int = 1,
    raise_on_budget: bool = True,
) -> SearchResult:
    """Find admissible increasing generators, validating each one.

    ``node_limit`` applies per anchor triple.
    """
    if L.size > size_limit:
        raise SearchRefused(f"lattice has {L.size} elements; the search limit is {size_limit}")
    triples = anchor_triples(L) if anchors is None else [tuple(t) for t in anchors]
    grid = value_grid(bound, denominators)
    args = [(L, t, grid, max_per_anchor, node_limit) for t in triples]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_search_one, *zip(*args)))
    else:
        outs = [_search_one(*a) for a in args]
    gens = [g for found, _, _ in outs for g in found]
    result = SearchResult(
        findings=[validate(G) for G in gens],
        nodes=sum(n for _, n, _ in outs),
        partial=any(p for _, _, p in outs),
    )
    if result.partial and raise_on_budget:
        raise BudgetExceeded(result)
    return result


def catalog_csv(result: SearchResult, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(["e1", "a", "e2", "values", "kind", "validated", "partial"])
    for f in result.findings:
        G, L = f.generator, f.generator.lattice
        vals = ";".join(f"{L.label(i)}={format_ext(v)}" for i, v in enumerate(G.values))
        w.writerow(
            [
                *L.labels(G.anchors),
                vals,
                f.kind or "",
                "yes" if f.sound else "no: " + "; ".join(f.problems),
                "yes" if result.partial else "no",
            ]
        )
    return buf.getvalue()
