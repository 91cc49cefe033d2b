"""Invariant bilinear forms and degree-two cocycles of the deformative
Schrodinger-Virasoro algebras, computed in exact rational arithmetic."""

from .algebra import (
    AlgebraParams,
    BasisElement,
    Element,
    L,
    M,
    Mode,
    Window,
    Y,
    ad_weight,
    bracket,
    enumerate_window,
    parse_basis_element,
)
from .cohomology import (
    BilinearMap,
    CohomologyReport,
    LinearFunctional,
    assemble_cocycle_system,
    coboundary_map,
    cohomology_report,
    solve_cocycles_core,
    xi_symmetrize,
)
from .forms import (
    BilinearForm,
    ClassificationResult,
    Convention,
    FamilyTag,
    classify,
    closed_form,
    invariance_violations,
    radical_basis,
)
from .invsolver import (
    DiscrepancyReport,
    InvSolution,
    assemble_invariance_system,
    compare_with_classification,
    fixture_grid,
    lemma_suite,
    solve_invariant_forms,
)
from .linalg import SparseMatrix, nullspace_basis, rref_rank

__version__ = "0.1.0"

__all__ = [
    "AlgebraParams",
    "BasisElement",
    "Element",
    "L",
    "M",
    "Mode",
    "Window",
    "Y",
    "ad_weight",
    "bracket",
    "enumerate_window",
    "parse_basis_element",
    "BilinearMap",
    "CohomologyReport",
    "LinearFunctional",
    "assemble_cocycle_system",
    "coboundary_map",
    "cohomology_report",
    "solve_cocycles_core",
    "xi_symmetrize",
    "BilinearForm",
    "ClassificationResult",
    "Convention",
    "FamilyTag",
    "classify",
    "closed_form",
    "invariance_violations",
    "radical_basis",
    "DiscrepancyReport",
    "InvSolution",
    "assemble_invariance_system",
    "compare_with_classification",
    "fixture_grid",
    "lemma_suite",
    "solve_invariant_forms",
    "SparseMatrix",
    "nullspace_basis",
    "rref_rank",
]
