"""Relation-theoretic fixed-point hypothesis checker for piecewise-affine maps on real intervals and finite metric spaces."""

from .comparison import Linear, OrderedTable, Rational, check_lambda_membership, check_phi_membership
from .contraction import Condition, CondKind, ContractionInstance, check_contraction, m_f, n_f
from .relation import Relation, RelKind, symmetric_closure
from .selfmap import SelfMap
from .space import Component, FiniteSet, IntervalUnion, MetricSpace
from .verdict import Kind, Verdict

__all__ = [
    "Component", "CondKind", "Condition", "ContractionInstance", "FiniteSet", "IntervalUnion", "Kind",
    "Linear", "MetricSpace", "OrderedTable", "Rational", "Relation", "RelKind", "SelfMap", "Verdict",
    "check_contraction", "check_lambda_membership", "check_phi_membership", "m_f", "n_f", "symmetric_closure",
]
