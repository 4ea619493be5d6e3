from zastava.coulomb import CoulombElement, coulomb_mul, coulomb_relations
from zastava.divisorbase import ColoredSubset, global_basis, gr_presentation
from zastava.exactalg import LinearForm, LinearProduct, RatFunc, Variable
from zastava.identify import check_identity, compare_with_segre, verify_all
from zastava.localspace import locality_relations, segre_equations
from zastava.quiver import DimVector, Quiver, SymMatrix, parse_quiver

__all__ = [
    "ColoredSubset",
    "CoulombElement",
    "DimVector",
    "LinearForm",
    "LinearProduct",
    "Quiver",
    "RatFunc",
    "SymMatrix",
    "Variable",
    "check_identity",
    "compare_with_segre",
    "coulomb_mul",
    "coulomb_relations",
    "global_basis",
    "gr_presentation",
    "locality_relations",
    "parse_quiver",
    "segre_equations",
    "verify_all",
]
