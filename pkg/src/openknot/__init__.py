"""Topological entanglement measures of open and closed polygonal curves.

Gauss linking integral, writhe and average crossing number in Banchoff's
finite form; knot/knotoid diagrams from generic projections with the
state-sum Kauffman bracket; projection-averaged bracket and Jones
polynomials by Monte-Carlo sampling of directions; and exact finite forms
for chains of 3 and 4 edges.
"""

from .chain3d import PolyChain, acn, crossing_sign, edge_linking, gauss_linking, writhe
from .diagram import Diagram, bracket, classify_4edge, normalized_bracket, project
from .finiteform import (
    E4Probabilities,
    bracket_e3,
    bracket_e4,
    bracket_p4_closed,
    jones_e3,
    jones_e4,
    p_k21,
)
from .laurent import LaurentPoly, mono
from .montecarlo import (
    BracketEstimate,
    DistributionEstimate,
    mc_bracket,
    mc_distribution,
    mc_jones,
    sample_direction,
)

__all__ = [
    "PolyChain",
    "LaurentPoly",
    "mono",
    "acn",
    "crossing_sign",
    "edge_linking",
    "gauss_linking",
    "writhe",
    "Diagram",
    "project",
    "bracket",
    "normalized_bracket",
    "classify_4edge",
    "bracket_e3",
    "bracket_e4",
    "bracket_p4_closed",
    "jones_e3",
    "jones_e4",
    "p_k21",
    "E4Probabilities",
    "BracketEstimate",
    "DistributionEstimate",
    "mc_bracket",
    "mc_jones",
    "mc_distribution",
    "sample_direction",
]

__version__ = "0.1.0"
