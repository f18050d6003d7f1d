"""Construction and exhaustive verification of 2-uninorms on finite lattices."""

from .lattice import (
    BoundError,
    CycleError,
    EmptyIntervalError,
    FiniteLattice,
    LatticeError,
    NotALattice,
    chain,
    load_lattice,
    parse_lattice,
)
from .genfun import (
    Direction,
    Generator,
    GeneratorError,
    IndeterminateSum,
    ModeMismatch,
    check_conditions,
    ext,
    ext_add,
    load_generator,
    parse_generator,
    pseudo_inverse,
    read_generator,
    summands_of,
)
from .construct import (
    ConditionsNotMet,
    KindMismatch,
    OpTable,
    construct_2uninorm,
    construct_alt_form,
    construct_variant,
)
from .verify import AxiomReport, Unclassifiable, classify, verify_full

__all__ = [name for name in dir() if not name.startswith("_")]
