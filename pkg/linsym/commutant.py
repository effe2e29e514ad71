from collections import namedtuple
import logging

from sympy import ImmutableMatrix
from sympy import Rational
from sympy.matrices.expressions.kronecker import kronecker_product

from linsym.exact import identity
from linsym.exact import kernel_basis
from linsym.exact import solve_linear
from linsym.memoize import memoize
from linsym.structure import surrogate_matrix

logger = logging.getLogger(__name__)

CommutantBasis = namedtuple('CommutantBasis', ['matrices', 'N'])


class IncompatibleEquationError(ValueError):
    pass


def commutator_map(D):
    """Matrix of H -> DH - HD acting on row-major vec(H)."""
    n = D.rows
    E = identity(n)
    return ImmutableMatrix(kronecker_product(D, E) - kronecker_product(E, D.T))


def _unvec(vector, n):
    return ImmutableMatrix(n, n, list(vector))


@memoize()
def commutant_basis(D):
    """Basis of the matrices commuting with D, in kernel pivot order."""
    n = D.rows
    matrices = tuple(_unvec(v, n) for v in kernel_basis(commutator_map(D)))
    logger.debug('commutant of a %dx%d matrix has dimension %d', n, n, len(matrices))
    return CommutantBasis(matrices, len(matrices))


def structure_commutant(structure):
    """Commutant of the canonical matrix of a Jordan structure.

    Numeric structures go through their rational surrogate, which has the
    same commutant.
    """
    return commutant_basis(surrogate_matrix(structure))


def gamma(structure):
    """diag(1, 2, ..., k1, 1, 2, ..., k2, ...) over the Jordan blocks."""
    entries = []
    for block in structure.blocks:
        entries.extend(range(1, block.size + 1))
    return entries


def gamma_particular(structure, kappa):
    """kappa * gamma, a particular solution of JH - HJ = kappa J."""
    kappa = Rational(kappa)
    if not structure.is_nilpotent():
        raise IncompatibleEquationError('shifted commutator equation incompatible: matrix is not nilpotent')
    n = structure.n
    diagonal = gamma(structure)
    return ImmutableMatrix(n, n, lambda i, j: kappa * diagonal[i] if i == j else 0)


def solve_sylvester_shift(D, kappa):
    """Some H with DH - HD = kappa D, or None when the system is inconsistent."""
    n = D.rows
    rhs = ImmutableMatrix(n * n, 1, list(Rational(kappa) * D))
    solution = solve_linear(commutator_map(D), rhs)
    if solution is None:
        return None
    return _unvec(solution, n)
