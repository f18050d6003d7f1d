"""Additive generators on finite lattices and their admissibility conditions.

Generator values live in the extended rationals: finite values are
``fractions.Fraction`` and the two infinities are the floats ``-inf`` and
``+inf``.  ``Fraction`` compares exactly against float infinities, so the
ordinary comparison operators give the total order we need; only addition
needs a guard (see :func:`ext_add`).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Union

import numpy as np

from .lattice import FiniteLattice

ExtValue = Union[Fraction, float]

NEG_INF: float = -math.inf
POS_INF: float = math.inf


class IndeterminateSum(ArithmeticError):
    pass


class GeneratorError(ValueError):
    """Base class for invalid generators; ``violations`` lists every problem found."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or [message]


class NotInjective(GeneratorError):
    pass


class NotMonotone(GeneratorError):
    pass


class AnchorNotZero(GeneratorError):
    pass


class AnchorOrder(GeneratorError):
    pass


class ModeMismatch(ValueError):
    pass


def ext(value) -> ExtValue:
    """Coerce ints, Fractions, infinite floats and strings like "-3/2" or "+inf"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, float):
        if math.isinf(value):
            return value
        raise ValueError(f"finite floats are not exact; pass {value!r} as a string or Fraction")
    if isinstance(value, str):
        text = value.strip().replace("−", "-").replace("∞", "inf")
        low = text.lower()
        if low in ("inf", "+inf", "infinity", "+infinity"):
            return POS_INF
        if low in ("-inf", "-infinity"):
            return NEG_INF
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an extended rational")


def is_finite(v: ExtValue) -> bool:
    return isinstance(v, Fraction)


def sign(v: ExtValue) -> int:
    return (v > 0) - (v < 0)


def ext_add(u: ExtValue, v: ExtValue) -> ExtValue:
    if not (is_finite(u) or is_finite(v)) and u != v:
        raise IndeterminateSum(f"{format_ext(u)} + {format_ext(v)}")
    if not is_finite(u):
        return u
    if not is_finite(v):
        return v
    return u + v


def format_ext(v: ExtValue) -> str:
    if v == POS_INF:
        return "+inf"
    if v == NEG_INF:
        return "-inf"
    return str(v)


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True, eq=False)
class Generator:
    """An injective monotone map from lattice elements to extended rationals.

    Use :func:`load_generator` to build one; it checks every invariant.
    """

    lattice: FiniteLattice
    values: tuple[ExtValue, ...]
    direction: Direction
    e1: int
    a: int
    e2: int
    preimage: Mapping[ExtValue, int] = field(repr=False)
    in_Ia: np.ndarray = field(repr=False)

    @property
    def increasing(self) -> bool:
        return self.direction is Direction.INCREASING

    @property
    def anchors(self) -> tuple[int, int, int]:
        return (self.e1, self.a, self.e2)

    def f(self, x: int) -> ExtValue:
        return self.values[x]

    def in_range(self, v: ExtValue) -> bool:
        return v in self.preimage

    def in_band(self, x: int) -> bool:
        """True when f(x) lies in the absorbing band (F_a or G_a): strictly
        between 0 and f(a), and x is incomparable with a."""
        v, fa = self.values[x], self.values[self.a]
        if not self.in_Ia[x]:
            return False
        return 0 < v < fa if self.increasing else fa < v < 0

    def as_table(self) -> dict[str, str]:
        return {self.lattice.label(i): format_ext(v) for i, v in enumerate(self.values)}

    def negated(self) -> "Generator":
        """x -> -f(x) with the opposite direction and the same anchors."""
        flipped = Direction.DECREASING if self.increasing else Direction.INCREASING
        return load_generator(
            self.lattice,
            {i: -v for i, v in enumerate(self.values)},
            flipped,
            self.e1,
            self.a,
            self.e2,
        )

    def to_json(self) -> dict:
        L = self.lattice
        return {
            "direction": self.direction.value,
            "e1": L.label(self.e1),
            "a": L.label(self.a),
            "e2": L.label(self.e2),
            "values": self.as_table(),
        }


def load_generator(
    L: FiniteLattice,
    table: Mapping,
    direction: Direction | str,
    e1,
    a,
    e2,
) -> Generator:
    """Validate a value table and anchors and return a :class:`Generator`.

    ``table`` maps element labels (or ids) to anything :func:`ext` accepts.
    All violations are collected; the exception raised is the class of the
    first one found, with the full list in ``violations``.
    """
    direction = Direction(direction)
    e1, a, e2 = L.id(e1), L.id(a), L.id(e2)
    values: list[ExtValue | None] = [None] * L.size
    for key, raw in table.items():
        x = L.id(key)
        if values[x] is not None:
            raise GeneratorError(f"element {L.label(x)!r} is given two values")
        values[x] = ext(raw)
    missing = [L.label(i) for i, v in enumerate(values) if v is None]
    if missing:
        raise GeneratorError(f"no value for elements {missing}")

    problems: list[tuple[type[GeneratorError], str]] = []

    seen: dict[ExtValue, int] = {}
    for x, v in enumerate(values):
        if v in seen:
            problems.append(
                (NotInjective, f"f({L.label(seen[v])}) = f({L.label(x)}) = {format_ext(v)}")
            )
        else:
            seen[v] = x

    inc = direction is Direction.INCREASING
    for x, y in L.cover_pairs():
        fx, fy = values[x], values[y]
        if (inc and not fx < fy) or (not inc and not fx > fy):
            problems.append(
                (
                    NotMonotone,
                    f"{L.label(x)} < {L.label(y)} but f = {format_ext(fx)}, {format_ext(fy)}",
                )
            )

    if values[e1] != 0:
        problems.append((AnchorNotZero, f"f({L.label(e1)}) = {format_ext(values[e1])}, expected 0"))
    if not (L.leq(e1, a) and L.leq(a, e2)):
        problems.append(
            (AnchorOrder, f"anchors must satisfy e1 <= a <= e2, got {L.labels((e1, a, e2))}")
        )

    if problems:
        cls, msg = problems[0]
        raise cls(msg, [m for _, m in problems])

    return Generator(
        lattice=L,
        values=tuple(values),
        direction=direction,
        e1=e1,
        a=a,
        e2=e2,
        preimage=seen,
        in_Ia=L.incomparable_mask(a),
    )


def parse_generator(L: FiniteLattice, doc: Mapping) -> Generator:
    try:
        return load_generator(L, doc["values"], doc["direction"], doc["e1"], doc["a"], doc["e2"])
    except KeyError as exc:
        raise GeneratorError(f"generator file is missing field or names unknown element: {exc}") from None


def read_generator(L: FiniteLattice, path: str | Path) -> Generator:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GeneratorError(f"{path}: not valid JSON ({exc})") from None
    return parse_generator(L, doc)


# ---------------------------------------------------------------------------
# pseudo-inverse and summands


def pseudo_inverse_flagged(G: Generator, y: ExtValue) -> tuple[int, bool]:
    """Pseudo-inverse of ``G`` at ``y`` plus a flag telling whether the
    empty-set convention (inf of nothing is top, sup of nothing is bottom)
    produced the answer."""
    x = G.preimage.get(y)
    if x is not None:
        return x, False
    above = [i for i, v in enumerate(G.values) if v > y]
    L = G.lattice
    if G.increasing:
        return L.meet_all(above), not above
    return L.join_all(above), not above


def pseudo_inverse(G: Generator, y: ExtValue) -> int:
    return pseudo_inverse_flagged(G, y)[0]


def summands_of(G: Generator, v: ExtValue) -> frozenset[ExtValue]:
    """Summands of ``v`` over the ground set Ran(f) together with 0.

    A nonzero range value counts as its own summand; otherwise s is a summand
    when v = s + b for some range value b with s * b > 0.
    """
    if v == 0:
        return frozenset()
    out = set()
    if v in G.preimage:
        out.add(v)
    sv = sign(v)
    for s in G.preimage:
        if sign(s) != sv:
            continue
        if is_finite(v):
            if not is_finite(s):
                continue
            b = v - s
        else:
            # s + b = v is infinite: b must be v itself
            b = v
        if b != 0 and sign(b) == sv and b in G.preimage:
            out.add(s)
    return frozenset(out)


# ---------------------------------------------------------------------------
# admissibility conditions
#
# Every condition is a predicate ``violation(G, x, y)`` returning None when the
# pair is fine and a short explanation string otherwise.  Checkers enumerate
# ordered pairs in id order, so the first witness is lexicographically least.


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class ConditionEntry:
    condition: str
    status: Status
    witness: tuple[int, ...] | None = None
    detail: str = ""


@dataclass(frozen=True)
class ConditionReport:
    mode: str
    direction: Direction
    entries: tuple[ConditionEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.status is not Status.FAIL for e in self.entries)

    def failed(self) -> list[str]:
        return [e.condition for e in self.entries if e.status is Status.FAIL]

    def entry(self, condition: str) -> ConditionEntry:
        for e in self.entries:
            if e.condition == condition:
                return e
        raise KeyError(condition)


class _Ctx:
    """Per-generator precomputation shared by the predicates."""

    def __init__(self, G: Generator):
        self.G = G
        self.L = G.lattice
        self.f = G.values
        self.fa = G.values[G.a]
        self.f0 = G.values[G.lattice.bottom]
        self._summands: dict[ExtValue, frozenset] = {}

    def summands(self, v: ExtValue) -> frozenset:
        s = self._summands.get(v)
        if s is None:
            s = self._summands[v] = summands_of(self.G, v)
        return s

    def pos_box(self, x: int, y: int) -> bool:
        """Both values in [0, f(a)] (increasing) or [f(a), 0] (decreasing)."""
        fx, fy, fa = self.f[x], self.f[y], self.fa
        if self.G.increasing:
            return 0 <= fx <= fa and 0 <= fy <= fa
        return fa <= fx <= 0 and fa <= fy <= 0

    def neg_box(self, x: int, y: int) -> bool:
        """Both values in [-inf, 0] (increasing) or [0, +inf] (decreasing)."""
        fx, fy = self.f[x], self.f[y]
        if self.G.increasing:
            return fx <= 0 and fy <= 0
        return fx >= 0 and fy >= 0


def _name(ctx: _Ctx, *ids: int) -> str:
    return ", ".join(ctx.L.label(i) for i in ids)


def _cond_i(ctx: _Ctx, x: int, y: int) -> str | None:
    if not (ctx.pos_box(x, y) or ctx.neg_box(x, y)):
        return None
    s = ext_add(ctx.f[x], ctx.f[y])
    if ctx.G.increasing:
        m = min(s, ctx.fa)
        ok = ctx.G.in_range(m) or m < ctx.f0
        bound = "min"
    else:
        m = max(s, ctx.fa)
        ok = ctx.G.in_range(m) or m > ctx.f0
        bound = "max"
    if ok:
        return None
    return f"{bound}(f({_name(ctx, x)}) + f({_name(ctx, y)}), f(a)) = {format_ext(m)} is outside Ran(f) and beyond f(0)"


def _cond_ii(ctx: _Ctx, x: int, y: int) -> str | None:
    G = ctx.G
    if ctx.neg_box(x, y):
        pass
    elif ctx.pos_box(x, y) and not (G.in_Ia[x] or G.in_Ia[y]):
        pass
    else:
        return None
    if not ctx.L.incomparable(x, y):
        return None
    shared = ctx.summands(ctx.f[x]) & ctx.summands(ctx.f[y])
    if not shared:
        return None
    s = min(shared, key=lambda v: (abs(v), v))
    return f"f({_name(ctx, x)}) and f({_name(ctx, y)}) share summand {format_ext(s)} but are incomparable"


def _cond_iii(ctx: _Ctx, x: int, y: int) -> str | None:
    fx, fy, fa = ctx.f[x], ctx.f[y], ctx.fa
    L, e1 = ctx.L, ctx.G.e1
    if ctx.G.increasing:
        hit = fx < 0 < fy <= fa and L.lt(x, e1)
    else:
        # the partner with positive value lies below e1
        hit = fa <= fx < 0 < fy and L.lt(y, e1)
    if hit and L.incomparable(x, y):
        return f"{_name(ctx, x)} and {_name(ctx, y)} are incomparable"
    return None


def _cond_iv(ctx: _Ctx, x: int, y: int) -> str | None:
    fx, fy, fa = ctx.f[x], ctx.f[y], ctx.fa
    # second clause uses 0 <= f(a): with e1 = a it must still tie negative
    # elements to a, otherwise monotonicity breaks
    if ctx.G.increasing:
        hit = fa <= fx < fy or fx < 0 <= fa <= fy
    else:
        hit = fa >= fx > fy or fx <= fa <= 0 < fy
    if hit and ctx.L.incomparable(x, y):
        return f"{_name(ctx, x)} and {_name(ctx, y)} are incomparable"
    return None


def _cond_iv_prime(ctx: _Ctx, x: int, y: int) -> str | None:
    fx, fy, fa = ctx.f[x], ctx.f[y], ctx.fa
    if fa <= fx < fy and ctx.L.incomparable(x, y):
        return f"{_name(ctx, x)} and {_name(ctx, y)} are incomparable"
    return None


def _cond_iv_dprime(ctx: _Ctx, x: int, y: int) -> str | None:
    fx, fy, fa = ctx.f[x], ctx.f[y], ctx.fa
    if fx < fy <= fa and ctx.L.incomparable(x, y):
        return f"{_name(ctx, x)} and {_name(ctx, y)} are incomparable"
    return None


def _cond_v(ctx: _Ctx, x: int, y: int) -> str | None:
    fx, fy, fa = ctx.f[x], ctx.f[y], ctx.fa
    G = ctx.G
    if G.increasing:
        if not (0 < fx < fa and 0 < fy < fa):
            return None
        s = ext_add(fx, fy)
        if not (G.in_range(s) and 0 < s <= fa):
            return None
    else:
        if not (fa < fx < 0 and fa < fy < 0):
            return None
        s = ext_add(fx, fy)
        if not (G.in_range(s) and fa <= s < 0):
            return None
    z = G.preimage[s]
    if ctx.L.incomparable(z, G.a):
        return f"f({_name(ctx, x)}) + f({_name(ctx, y)}) = f({_name(ctx, z)}) and {_name(ctx, z)} is incomparable with a"
    return None


PREDICATES: dict[str, Callable[[_Ctx, int, int], str | None]] = {
    "i": _cond_i,
    "ii": _cond_ii,
    "iii": _cond_iii,
    "iv": _cond_iv,
    "v": _cond_v,
    "iv'": _cond_iv_prime,
    "iv''": _cond_iv_dprime,
    "chain-i": _cond_i,
}

MODES: dict[str, tuple[str, ...]] = {
    "full": ("i", "ii", "iii", "iv", "v"),
    "relaxed-iv'": ("i", "ii", "v", "iv'"),
    "relaxed-iv''": ("i", "ii", "v", "iv''"),
    "uninorm": ("i", "ii", "iii"),
    "chain": ("chain-i",),
}


def _check_mode(G: Generator, mode: str) -> None:
    L = G.lattice
    if mode not in MODES:
        raise ModeMismatch(f"unknown mode {mode!r}; choose from {sorted(MODES)}")
    if mode == "chain" and not L.is_chain():
        raise ModeMismatch("chain mode needs a totally ordered lattice")
    if mode == "relaxed-iv'" and not (G.increasing and G.e1 == L.bottom):
        raise ModeMismatch("relaxed-iv' needs an increasing generator with e1 = bottom")
    if mode == "relaxed-iv''" and not (not G.increasing and G.e1 == L.bottom):
        raise ModeMismatch("relaxed-iv'' needs a decreasing generator with e1 = bottom")
    if mode == "uninorm" and G.a != L.top:
        raise ModeMismatch("uninorm mode needs a = top")


def _pairs(n: int) -> Iterator[tuple[int, int]]:
    for x in range(n):
        for y in range(n):
            yield x, y


def check_conditions(G: Generator, mode: str = "full") -> ConditionReport:
    """Evaluate the admissibility conditions of ``mode`` over all ordered pairs."""
    _check_mode(G, mode)
    ctx = _Ctx(G)
    entries = []
    for cond in MODES[mode]:
        pred = PREDICATES[cond]
        for x, y in _pairs(G.lattice.size):
            msg = pred(ctx, x, y)
            if msg is not None:
                entries.append(ConditionEntry(cond, Status.FAIL, (x, y), msg))
                break
        else:
            entries.append(ConditionEntry(cond, Status.PASS))
    return ConditionReport(mode, G.direction, tuple(entries))


def recheck(G: Generator, entry: ConditionEntry) -> bool:
    """Re-evaluate a failed entry's witness; True when the violation reproduces."""
    if entry.witness is None:
        return False
    x, y = entry.witness[:2]
    return PREDICATES[entry.condition](_Ctx(G), x, y) is not None


def condition_holds(G: Generator, cond: str, pairs: Iterable[tuple[int, int]] | None = None) -> bool:
    ctx = _Ctx(G)
    pred = PREDICATES[cond]
    pairs = _pairs(G.lattice.size) if pairs is None else pairs
    return all(pred(ctx, x, y) is None for x, y in pairs)
