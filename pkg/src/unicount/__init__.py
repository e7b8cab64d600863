"""Exact character-degree counts for unitriangular groups over F_q."""

from .polyring import CountPoly, ParamPoly
from .algdata import AlgebraicData, NonZero, Equation
from .engine import Census, EngineContext, census, census_at, resolve
from .patterns import Poset, chain, pattern_census, unitriangular_census

__all__ = [
    "CountPoly", "ParamPoly", "AlgebraicData", "NonZero", "Equation",
    "Census", "EngineContext", "census", "census_at", "resolve",
    "Poset", "chain", "pattern_census", "unitriangular_census",
]
