"""Verification, solving and classification of the finite polynomial systems
behind C*-near-group categories over finite abelian groups (irrational case),
with an independent Cuntz-algebra word oracle and the downstream invariants:
Frobenius-Schur indicators, automorphism groups, principal graphs, and fusion
rules of (de-)equivariantizations.
"""

from .abelian import (
    Bicharacter,
    FiniteAbelianGroup,
    Phase,
    QuadraticForm,
    enumerate_bicharacters,
    enumerate_quadratic_forms,
)
from .solutions import (
    GeneralSolution,
    MNSolution,
    residual_general,
    residual_mn,
)

__version__ = "0.1.0"
