"""Exact blockwise cohomology for Lie algebroid presentations."""

from .graded import (
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    basis_enumerate,
    apply_derivation,
    derivation_commutator,
    multiply,
)
from .algebroid import (
    AlgebroidPresentation,
    DeRhamComplex,
    ValidationReport,
    build_differential,
    standard_preset,
    validate,
)
from .deformation import (
    DefCochain,
    McDefectReport,
    Multiderivation,
    def_bracket,
    def_delta,
    deform,
    delta_multiderivation,
    from_multiderivation,
    mc_defect,
    to_multiderivation,
)
from .morphism import (
    AlgebroidMorphism,
    RelativeCochain,
    lower_star,
    pullback_forms,
    relative_delta,
    upper_star,
)
from .pullback import (
    FormComplex,
    FormValuedVectorField,
    PullbackPresentation,
    SpectralBlock,
    SubmersionSpec,
    e_page,
    filtration_level,
    fn_decompose,
    homotopy_h,
    kernel_acyclicity_check,
    pullback_algebroid,
    ses_check,
    vertical_de_rham,
)
from .cohomology import (
    CohomologyReport,
    InducedMapEntry,
    MoritaReport,
    betti,
    block_matrix,
    induced_map,
    morita_check,
)
from .foliation import (
    BottComplex,
    FoliationSpec,
    bott_complex,
    def_vs_bott,
    flag_check,
    foliation_algebroid,
)
from .linalg import SparseRationalMatrix
from .dsl import Diagnostic, SpecDocument, emit, parse

__all__ = [name for name in dir() if not name.startswith("_")]
