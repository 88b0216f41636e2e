"""Spin-chain ground-state solvers over epsilon-nets."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__ as _core_doc
except ImportError:  # in-tree test runs load the extension from the build dir
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__all__ = [
    "ChainHamiltonian",
    "make_preset",
    "parse_hamiltonian",
    "serialize_hamiltonian",
    "fold_pbc",
    "solve_classical",
    "solve_mean_field",
    "solve_mps",
    "exact_diagonalize",
    "als_baseline",
    "estimate_cost",
    "SchemaError",
    "ValidationError",
    "BudgetError",
]
