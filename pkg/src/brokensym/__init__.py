"""Exact integral triply graded homology of braid closures."""

from .braid import BraidWord, format_braid, index_stats, markov_variants, parse_braid
from .chain import FgAbGroup, homology_of_fgab_complex, smith_normal_form
from .cube import TriplyGradedTable, compute_e2, invariance_check
from .hochschild import hochschild_homology, structural_oracle
from .ktheory import KBSPresentation, LaurentPoly
from .soergel import BSBimodule, bimodule_tensor_check
from .twisted import TwistSpec, twisted_e2

__all__ = [
    "BSBimodule",
    "BraidWord",
    "FgAbGroup",
    "KBSPresentation",
    "LaurentPoly",
    "TriplyGradedTable",
    "TwistSpec",
    "bimodule_tensor_check",
    "compute_e2",
    "format_braid",
    "hochschild_homology",
    "homology_of_fgab_complex",
    "index_stats",
    "invariance_check",
    "markov_variants",
    "parse_braid",
    "smith_normal_form",
    "structural_oracle",
    "twisted_e2",
]
