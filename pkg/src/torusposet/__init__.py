"""Exact computations with torus graphs, simplicial posets and face rings."""
from .errors import DimensionError, TorusPosetError, ValidationError
from .exactla import QQ, ZZ, Coeffs
from .polyring import Poly
from .sposet import BOTTOM, SimplicialPoset, validate_poset
from .torusgraph import TorusGraph, validate_graph

__version__ = "0.1.0"
