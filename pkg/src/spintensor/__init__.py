"""Exact spin-tensor calculus on composite spin-tensorial bundles.

Polynomial arithmetic over the Gaussian rationals, the SL(2,C) -> SO+(1,3)
map, spin-tensor fields and frame charts, native / degenerate / covariant
differentiations, torsion and curvature, and exact checks of the commutator
identities between these operators.
"""

from .algebra import ONE, ZERO, GaussianRational, Matrix, ScalarExpr, Var, coord, native, native_bar, x
from .bundle import CompositeBundleSpec, ExtendedField, FrameChart, SpinTensorType, tau
from .curvature import curvature_components, dynamic_curvature, torsion
from .diffops import (
    Connection,
    DegenerateTriple,
    connection_transform,
    covariant_along,
    covariant_derivative,
    degenerate_apply,
    native_derivative,
    native_derivative_bar,
)
from .spingroup import varphi

__version__ = "0.1.0"

__all__ = [
    "ONE", "ZERO", "GaussianRational", "Matrix", "ScalarExpr", "Var", "coord", "native", "native_bar", "x",
    "CompositeBundleSpec", "ExtendedField", "FrameChart", "SpinTensorType", "tau",
    "curvature_components", "dynamic_curvature", "torsion",
    "Connection", "DegenerateTriple", "connection_transform", "covariant_along", "covariant_derivative",
    "degenerate_apply", "native_derivative", "native_derivative_bar",
    "varphi",
]
