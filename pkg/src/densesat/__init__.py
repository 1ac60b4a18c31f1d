"""densesat: satisfiability for n-dense modal logics (K + box^n p -> box p).

The solver realizes a recursive-window tableau with backtracking search and
repetition-based chain acceptance; independent semantic oracles (bounded
Kripke-model search, a budgeted naive tableau, a terminating K tableau) and
machine-checkable certificates guard it.
"""

from .formula import (
    Formula,
    FormulaSet,
    ParseError,
    atom,
    bottom,
    box,
    classical_subformulas,
    conj,
    depth,
    diamond,
    disj,
    fset,
    implies,
    length,
    neg,
    parse,
    print_formula,
    subformulas,
    top,
)
from .ccs import box_minus, enumerate_ccs, is_ccs
from .windows import (
    ContinuationError,
    Window,
    WindowParams,
    WindowShapeError,
    check_window,
    chi_bound,
    degree_gap,
    empty_window,
    enumerate_continuations,
    enumerate_windows,
    glue,
    is_continuation,
    make_window,
    member_count_bound,
    members,
    partial,
    pointwise_included,
    window_from_json,
    window_to_json,
)
from .solver import (
    DenseSolver,
    ResourceLimitExceeded,
    SolveResult,
    SolveStats,
    SolverConfig,
    check_certificate,
    check_certificate_detail,
    sat_formula,
)
from .semantics import (
    KripkeModel,
    TableauResult,
    UnknownWorldError,
    brute_force_sat,
    is_n_dense,
    k_sat,
    model_check,
    naive_tableau,
)
from .reduction import AtomOccursError, tau, tau_size_check

__version__ = "0.1.0"

__all__ = [
    "Formula", "FormulaSet", "ParseError", "atom", "bottom", "box", "conj",
    "neg", "diamond", "disj", "implies", "top", "parse", "print_formula",
    "depth", "length", "subformulas", "classical_subformulas", "fset",
    "box_minus", "enumerate_ccs", "is_ccs",
    "Window", "WindowParams", "WindowShapeError", "ContinuationError",
    "check_window", "members", "partial", "pointwise_included",
    "is_continuation", "glue", "degree_gap", "enumerate_windows",
    "enumerate_continuations", "chi_bound", "member_count_bound",
    "make_window", "empty_window", "window_to_json", "window_from_json",
    "DenseSolver", "SolverConfig", "SolveResult", "SolveStats",
    "ResourceLimitExceeded", "sat_formula", "check_certificate",
    "check_certificate_detail",
    "KripkeModel", "TableauResult", "UnknownWorldError", "model_check",
    "is_n_dense", "brute_force_sat", "naive_tableau", "k_sat",
    "tau", "tau_size_check", "AtomOccursError",
    "__version__",
]
