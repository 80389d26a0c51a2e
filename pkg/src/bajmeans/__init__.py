"""Generalized Bajraktarević means.

``A(x) = f^(-1)( sum p_i(x_i) f(x_i) / sum p_i(x_i) )`` for a strictly monotone
generator ``f`` and positive weights ``p_1..p_n``, evaluated through a
generalized left inverse so discontinuous generators are allowed.
"""

from .diagderiv import derivative_table, fd_partial, formula
from .equality import (
    DecisionConfig,
    Equal,
    Inconclusive,
    MobiusParams,
    NotEqual,
    QuadPoly,
    decide_equality,
    exceptional_construct,
    mobius_transform,
    recheck,
    recover_mobius,
    recover_weight,
    transform_spec,
)
from .exprcore import Direction, Interval, MonotoneFn, evaluate, parse, to_str
from .geninv import LeftInverse, verify_smf
from .jets import Jet3, jet_eval, schwarzian
from .mean import MeanSpec, WeightSystem, make_spec, mean_eval, root_solve

__all__ = [
    "DecisionConfig",
    "Direction",
    "Equal",
    "Inconclusive",
    "Interval",
    "Jet3",
    "LeftInverse",
    "MeanSpec",
    "MobiusParams",
    "MonotoneFn",
    "NotEqual",
    "QuadPoly",
    "WeightSystem",
    "decide_equality",
    "derivative_table",
    "evaluate",
    "exceptional_construct",
    "fd_partial",
    "formula",
    "jet_eval",
    "make_spec",
    "mean_eval",
    "mobius_transform",
    "parse",
    "recheck",
    "recover_mobius",
    "recover_weight",
    "root_solve",
    "schwarzian",
    "to_str",
    "transform_spec",
    "verify_smf",
]
