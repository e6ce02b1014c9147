"""Volterra symbol calculus: summation of symbol expansions, parametrices and heat coefficients."""

import json

from ._core import (
    CertificationError,
    Context,
    DomainError,
    InvalidArgument,
    ParseError,
    PoleError,
    PositivityError,
    QuadratureError,
    SymExpr,
    VolterraError,
    a_epsilon,
    context,
    mehler_oracle,
    mehler_taylor,
    pseudo_norm,
    rho,
)
from . import _core


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def parametrix(operator, J=4):
    """Components q_(-w-j), j <= J, and the composition check for an operator spec."""
    return json.loads(_core._parametrix(_text(operator), J))


def heat_coefficients(operator, J=4, x=(0.0,), resolution=1.0):
    return json.loads(_core._heat(_text(operator), J, list(x), resolution))


def realize(expansion, method="analytic", depth=-1, budget=3, seed=1):
    """Sums an expansion with the cutoff, analytic or translation method."""
    return json.loads(_core._sum(_text(expansion), method, depth, budget, seed))


def kernel(symbol, t, x=0.0, y=(0.0,), tol=1e-6, resolution=1.0):
    return json.loads(_core._kernel(_text(symbol), x, list(y), list(t), tol, resolution))


__all__ = [
    "CertificationError",
    "Context",
    "DomainError",
    "InvalidArgument",
    "ParseError",
    "PoleError",
    "PositivityError",
    "QuadratureError",
    "SymExpr",
    "VolterraError",
    "a_epsilon",
    "context",
    "heat_coefficients",
    "kernel",
    "mehler_oracle",
    "mehler_taylor",
    "parametrix",
    "pseudo_norm",
    "realize",
    "rho",
]
