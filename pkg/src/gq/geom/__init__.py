"""Jets, lifts and normal-bundle constructions on flat charts."""
from .jets import FiltrationDiffeo, JetSpace, chart_ring, lift
from .normal import (DNBReport, WNBReport, double_normal_gr,
                     double_normal_subquotient, flip, weighted_normal_order2)
from .weil import (WeilAlgebra, WeilElement, jet_evaluate, symmetrize_element,
                   symmetrize_jet)

__all__ = [
    "FiltrationDiffeo", "JetSpace", "chart_ring", "lift", "DNBReport", "WNBReport",
    "double_normal_gr", "double_normal_subquotient", "flip", "weighted_normal_order2",
    "WeilAlgebra", "WeilElement", "jet_evaluate", "symmetrize_element", "symmetrize_jet",
]
