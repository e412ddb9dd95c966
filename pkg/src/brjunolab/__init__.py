"""Certified continued-fraction tools for small-divisor conditions.

Modules
-------
cf           continued fractions, convergents, certified enclosures
diophantine  A(beta, gamma), Brjuno and alpha-Brjuno-Russmann series, Psi
potential    Farey measure, log-kernel potentials, divergence scans
capacity     discretised energy minimisation for C_sigma = 1/W_sigma
hausdorff    gauge functions and cover-based premeasure bounds
cli          the ``brjunolab`` command
"""
__version__ = "0.1.0"

from ._accel import backend
from .cf import (CertifiedReal, Convergent, ExplicitCF, PartialQuotients, QuadraticIrrational,
                 convergents, parse_number)
from .diophantine import ConditionParams

__all__ = [
    "CertifiedReal",
    "ConditionParams",
    "Convergent",
    "ExplicitCF",
    "PartialQuotients",
    "QuadraticIrrational",
    "backend",
    "convergents",
    "parse_number",
]
