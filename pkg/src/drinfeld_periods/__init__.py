"""Certified finite-precision periods of rank-2 Drinfeld modules.

Layers: ``ffield`` (finite fields), ``cinf`` (truncated Puiseux model of
C_infinity), ``drinfeld`` (modules, exp/log/quasi-periodic streams),
``anderson`` (series in t, generating functions, Omega), ``periods``
(lattices, quasi-periods, third-kind periods), ``motives`` (difference
matrices), ``config``/``checks``/``cli`` (sessions and reports).
"""

from .cinf import Context, PuiseuxApprox, hensel_refine, newton_polygon, poly_roots
from .config import Session, SessionConfig
from .drinfeld import DrinfeldModule, TwistedPoly
from .errors import (
    ConvergenceError,
    DrinfeldError,
    FieldMismatchError,
    PrecisionError,
    RepresentationError,
    RootFindingError,
    ValidationError,
)
from .ffield import FFElem, FiniteField, ff_make, ff_solve_kummer
from .periods import PeriodLattice, compute_lattice, log_algebraic, period_basis, verify_third_kind

__all__ = [
    "Context",
    "PuiseuxApprox",
    "hensel_refine",
    "newton_polygon",
    "poly_roots",
    "Session",
    "SessionConfig",
    "DrinfeldModule",
    "TwistedPoly",
    "ConvergenceError",
    "DrinfeldError",
    "FieldMismatchError",
    "PrecisionError",
    "RepresentationError",
    "RootFindingError",
    "ValidationError",
    "FFElem",
    "FiniteField",
    "ff_make",
    "ff_solve_kummer",
    "PeriodLattice",
    "compute_lattice",
    "log_algebraic",
    "period_basis",
    "verify_third_kind",
]
