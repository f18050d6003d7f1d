"""Packaged example lattices and generators.

``L1``/``L2`` are the 16-element lattices of the worked examples; the
generator files hold the admissible Table-1 generator, its five broken
variants, and degenerate-anchor generators for each specialization.  The
infinite lattice with f(x_i) = i - 4 is available as a finite truncation via
:func:`example2`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib.resources import files

from .genfun import Direction, Generator, load_generator, parse_generator
from .lattice import FiniteLattice, parse_lattice

DATA = files(__package__) / "data"

GENERATOR_FILES = {
    "table1": ("L1", "f_table1"),
    "f1": ("L1", "f1"),
    "f2": ("L1", "f2"),
    "f3": ("L2", "f3"),
    "f4": ("L1", "f4"),
    "f5": ("L1", "f5"),
    "uni-nullnorm": ("L1", "f_uni_nullnorm"),
}


def _read(name: str) -> dict:
    return json.loads((DATA / f"{name}.json").read_text())


@lru_cache(maxsize=None)
def lattice(name: str) -> FiniteLattice:
    """``"L1"`` or ``"L2"``."""
    return parse_lattice(_read(name))


def generator(name: str) -> Generator:
    lat, fname = GENERATOR_FILES[name]
    return parse_generator(lattice(lat), _read(fname))


@lru_cache(maxsize=None)
def _degenerate() -> tuple[FiniteLattice, dict]:
    doc = _read("degenerate")
    return parse_lattice(doc["lattice"]), doc["generators"]


def degenerate(kind: str) -> Generator:
    """Generator whose anchors make the operation a ``kind`` (null-uninorm,
    nullnorm, uninorm, t-norm, t-conorm) on a five-element lattice."""
    L, gens = _degenerate()
    return parse_generator(L, gens[kind])


def degenerate_kinds() -> list[str]:
    return list(_degenerate()[1])


# ---------------------------------------------------------------------------
# truncated infinite example


def _idx(text: str) -> Fraction:
    return Fraction(text)


# Each segment is a chain of indices hanging between two attachment points.
# Open dotted runs in the drawing are represented by their labelled points
# plus one midpoint.
_SEGMENTS = (
    # (indices, attached below, attached above)
    (("2.1", "2.15", "2.2"), "2", "3"),
    (("2.3", "2.35", "2.4"), "2", None),
    (("2.45", "2.49"), "2.4", "3"),
    (("2.91", "2.95", "2.99"), "2.4", "5"),
    (("2.5", "2.6", "2.71"), "2", None),
    (("2.75", "2.79"), "2.71", "3"),
    (("2.8", "2.85", "2.9"), "2.71", "5"),
    (("5.1", "5.3", "5.49"), "5", "5.79"),
    (("5.61", "5.65", "5.7"), "5", None),
    (("5.75",), "5.7", "5.79"),
    (("5.8", "5.85", "5.9"), "5.7", "9"),
    (("5.51", "5.55", "5.6"), "5", "9.9"),
)
_BOTTOM_CHAIN = ("0", "0.1", "1", "2")
_MIDDLE_CHAIN = ("3", "4", "5")
_TOP_CHAIN = ("5.79", "6", "7", "8", "9", "9.9", "10")


def _label(i: Fraction) -> str:
    if i.denominator == 1:
        return f"x{i.numerator}"
    return "x" + format(float(i), "g") if Fraction(str(float(i))) == i else f"x{i.numerator}/{i.denominator}"


def example2() -> tuple[FiniteLattice, Generator]:
    """Finite truncation with f(x_i) = i - 4, e1 = x4, a = x7, e2 = x9.

    The labelled elements are kept and the chains [x0, x2] and [x6, x7] are
    closed under the index sums the construction produces (i + j - 4 below
    x4 and min(i + j - 4, 7) above it), so every pseudo-inverse lands on an
    exact preimage.
    """
    bottom = [_idx(s) for s in _BOTTOM_CHAIN]
    middle = [_idx(s) for s in _MIDDLE_CHAIN]
    top = [_idx(s) for s in _TOP_CHAIN]
    segments = [([_idx(s) for s in seg], lo, hi) for seg, lo, hi in _SEGMENTS]

    negative = set(bottom) | set(middle[:1]) | {i for seg, _, _ in segments for i in seg if i < 4}
    positive = {i for seg, _, _ in segments for i in seg if 4 < i <= 7} | {i for i in top if i <= 7} | {_idx("5")}

    def close(chain: list[Fraction], region: set[Fraction], lo: int, hi: int, clip: int | None):
        members = set(chain)
        while True:
            pool = region | members
            new = set()
            for i in pool:
                for j in pool:
                    s = i + j - 4
                    if clip is not None:
                        s = min(s, clip)
                    if lo <= s <= hi and s not in members:
                        new.add(s)
            if not new:
                return sorted(members)
            members |= new

    bottom = close(bottom, negative, 0, 2, None)
    sixes = close([i for i in top if 6 <= i <= 7], positive, 6, 7, 7)
    top = sorted(set(top) | set(sixes))

    covers: list[tuple[Fraction, Fraction]] = []
    for chain in (bottom, top):
        covers += list(zip(chain, chain[1:]))
    covers += [(bottom[-1], middle[0])] + list(zip(middle, middle[1:])) + [(middle[-1], top[0])]
    for seg, lo, hi in segments:
        covers += list(zip(seg, seg[1:]))
        covers.append((_idx(lo), seg[0]))
        if hi is not None:
            covers.append((seg[-1], _idx(hi)))

    indices = sorted({i for edge in covers for i in edge})
    labels = {i: _label(i) for i in indices}
    L = FiniteLattice.from_covers(
        [labels[i] for i in indices],
        [(labels[x], labels[y]) for x, y in covers],
        labels[indices[0]],
        labels[indices[-1]],
    )
    values = {labels[i]: i - 4 for i in indices}
    G = load_generator(L, values, Direction.INCREASING, "x4", "x7", "x9")
    return L, G


def index_of(label: str) -> Fraction:
    """Inverse of the example-2 labelling: ``"x2.49"`` -> 249/100."""
    return Fraction(label[1:])
