from collections import namedtuple
import logging

import numpy
import sympy
from sympy import ImmutableMatrix
from sympy import Poly
from sympy import QQ
from sympy.utilities.iterables import partitions

from linsym.commutant import gamma_particular
from linsym.commutant import structure_commutant
from linsym.exact import exact_scalar
from linsym.exact import to_sympy
from linsym.exppoly import FREQUENCY_TOLERANCE
from linsym.exppoly import ExpPoly
from linsym.exppoly import apply_matrix
from linsym.exppoly import fundamental_system
from linsym.structure import COMPLEX
from linsym.structure import FREE
from linsym.structure import NILPOTENT
from linsym.structure import NON_NILPOTENT
from linsym.structure import classify
from linsym.structure import commutant_count_from_partition
from linsym.structure import is_exact_value
from linsym.structure import jordan_matrix
from linsym.structure import smith_invariant_factors

logger = logging.getLogger(__name__)

SOLUTION = 'solution'
COMMUTANT = 'commutant'
TIME_TRANSLATION = 'time_translation'
DILATION = 'dilation'
PROJECTIVE = 'projective'
BRACKET = 'bracket'
FAMILIES = (SOLUTION, COMMUTANT, TIME_TRANSLATION, DILATION, PROJECTIVE)

MAXIMAL = 'maximal'
SUBMAXIMAL = 'submaximal'
SINGLE_NILPOTENT_BLOCK = 'single_nilpotent_block'
MINIMAL = 'minimal'

T = sympy.Symbol('t')

DimensionReport = namedtuple('DimensionReport', ['dimension', 'classification', 'N', 'partition'])


class ScalarSystemError(ValueError):
    pass


class ExactnessError(ValueError):
    pass


def state_symbols(n):
    return sympy.symbols('x1:{}'.format(n + 1))


def velocity_symbols(n):
    return sympy.symbols('v1:{}'.format(n + 1))


def as_array(M, numeric):
    """numpy array of a matrix: complex when numeric, else objects holding exact scalars."""
    rows = M.tolist() if hasattr(M, 'tolist') else M
    if numeric:
        return numpy.array([[complex(v) for v in row] for row in rows], dtype=complex)
    return numpy.array([[exact_scalar(v) for v in row] for row in rows], dtype=object)


def _scalar(value, numeric):
    return complex(value) if numeric else exact_scalar(value)


class VectorField(object):
    """(c1 t + c0) d/dt + (H x + phi(t)) . d/dx"""

    restricted = True

    def __init__(self, c1, c0, H, drift, family, numeric=False):
        self.numeric = numeric
        self.c1 = _scalar(c1, numeric)
        self.c0 = _scalar(c0, numeric)
        self.H = as_array(H, numeric)
        self.drift = tuple(phi.to_numeric() if numeric else phi for phi in drift)
        self.family = family
        if self.H.shape != (len(self.drift), len(self.drift)):
            raise ValueError('linear part and drift sizes differ')
        if any(phi.numeric and not numeric for phi in self.drift):
            raise ValueError('numeric drift in an exact vector field')

    @property
    def n(self):
        return len(self.drift)

    @classmethod
    def solution(cls, phi, numeric=False):
        n = len(phi)
        return cls(0, 0, numpy.zeros((n, n), dtype=int), phi, SOLUTION, numeric)

    @classmethod
    def linear(cls, H, family=COMMUTANT, c1=0, numeric=False):
        n = H.shape[0]
        return cls(c1, 0, H, [ExpPoly.zero(numeric)] * n, family, numeric)

    @classmethod
    def time_translation(cls, n, numeric=False):
        return cls(0, 1, numpy.zeros((n, n), dtype=int), [ExpPoly.zero(numeric)] * n, TIME_TRANSLATION, numeric)

    def to_numeric(self):
        if self.numeric:
            return self
        return VectorField(self.c1, self.c0, self.H, self.drift, self.family, True)

    def bracket(self, other):
        """[self, other] as derivations; the restricted form is closed under it."""
        if self.numeric != other.numeric:
            a, b = self.to_numeric(), other.to_numeric()
            return a.bracket(b)
        if self.n != other.n:
            raise ValueError('vector fields act on different dimensions')

        c1 = 0
        c0 = self.c0 * other.c1 - other.c0 * self.c1
        H = other.H.dot(self.H) - self.H.dot(other.H)

        first = apply_matrix(other.H, self.drift)
        second = apply_matrix(self.H, other.drift)
        drift = []
        for b in range(self.n):
            d_other = other.drift[b].differentiate()
            d_self = self.drift[b].differentiate()
            component = (d_other.times_t().scale(self.c1) + d_other.scale(self.c0) -
                         d_self.times_t().scale(other.c1) - d_self.scale(other.c0) +
                         first[b] - second[b])
            drift.append(component)

        return VectorField(c1, c0, H, drift, BRACKET, self.numeric)

    def coordinates(self):
        """Sparse exact coordinates: c1, c0, entries of H and exp-poly terms of phi."""
        coordinates = {}
        if self.c1 != 0:
            coordinates[('c1',)] = self.c1
        if self.c0 != 0:
            coordinates[('c0',)] = self.c0
        for (b, a), value in numpy.ndenumerate(self.H):
            if value != 0:
                coordinates[('H', b, a)] = value
        for b, phi in enumerate(self.drift):
            for c, p, f in phi.terms:
                coordinates[('phi', b, p, f)] = c
        return coordinates

    def expressions(self, t, xs):
        """Sympy expressions for xi and the components of eta."""
        xi = to_sympy(self.c1) * t + to_sympy(self.c0)
        eta = []
        for b in range(self.n):
            linear = sympy.Add(*[to_sympy(self.H[b, a]) * xs[a] for a in range(self.n)])
            eta.append(linear + self.drift[b].to_sympy(t))
        return xi, eta

    def evaluate(self, t, x):
        xi = complex(self.c1) * t + complex(self.c0)
        H = as_array(self.H, True)
        eta = H.dot(numpy.asarray(x, dtype=complex)) + numpy.array([phi.evaluate(t) for phi in self.drift])
        return xi, eta

    def lift(self, P, P_inverse):
        H = P.dot(self.H).dot(P_inverse)
        drift = apply_matrix(P, self.drift)
        return VectorField(self.c1, self.c0, H, drift, self.family, self.numeric)

    def render(self):
        xi, eta = self.expressions(T, state_symbols(self.n))
        parts = []
        if xi != 0:
            parts.append('({})*d_t'.format(xi))
        for b, component in enumerate(eta):
            if component != 0:
                parts.append('({})*d_x{}'.format(component, b + 1))
        return ' + '.join(parts) or '0'

    def __str__(self):
        return self.render()


class ProjectiveVectorField(object):
    """Vector field whose coefficients are polynomials of degree at most 2 in (t, x)."""

    restricted = False
    numeric = False

    def __init__(self, xi, eta, family=PROJECTIVE):
        n = len(eta)
        gens = (T,) + state_symbols(n)
        self.xi = Poly(xi, *gens, domain=QQ)
        self.eta = tuple(Poly(e, *gens, domain=QQ) for e in eta)
        self.family = family

    @property
    def n(self):
        return len(self.eta)

    def _apply(self, f):
        gens = self.xi.gens
        result = self.xi * f.diff(gens[0])
        for b, component in enumerate(self.eta):
            result += component * f.diff(gens[b + 1])
        return result

    def bracket(self, other):
        if self.n != other.n:
            raise ValueError('vector fields act on different dimensions')
        xi = self._apply(other.xi) - other._apply(self.xi)
        eta = [self._apply(other.eta[b]) - other._apply(self.eta[b]) for b in range(self.n)]
        return ProjectiveVectorField(xi.as_expr(), [e.as_expr() for e in eta], BRACKET)

    def coordinates(self):
        coordinates = {('xi', monom): c for monom, c in self.xi.terms() if c != 0}
        for b, component in enumerate(self.eta):
            coordinates.update({('eta', b, monom): c for monom, c in component.terms() if c != 0})
        return coordinates

    def expressions(self, t, xs):
        substitution = dict(zip(self.xi.gens, (t,) + tuple(xs)))
        return (self.xi.as_expr().xreplace(substitution),
                [e.as_expr().xreplace(substitution) for e in self.eta])

    def evaluate(self, t, x):
        values = dict(zip(self.xi.gens, (t,) + tuple(x)))
        return (complex(self.xi.as_expr().subs(values)),
                numpy.array([complex(e.as_expr().subs(values)) for e in self.eta]))

    def render(self):
        parts = []
        if not self.xi.is_zero:
            parts.append('({})*d_t'.format(self.xi.as_expr()))
        for b, component in enumerate(self.eta):
            if not component.is_zero:
                parts.append('({})*d_x{}'.format(component.as_expr(), b + 1))
        return ' + '.join(parts) or '0'

    def __str__(self):
        return self.render()


class SymmetryAlgebra(object):
    """Generators of a maximal Lie invariance algebra and the system they belong to.

    ``matrix`` is the matrix J of x'' = J x in the coordinates the generators
    are written in.
    """

    def __init__(self, generators, classification, N, field, matrix, structure=None, numeric=False):
        self.generators = list(generators)
        self.classification = classification
        self.N = N
        self.field = field
        self.matrix = matrix
        self.structure = structure
        self.numeric = numeric

    @property
    def dimension(self):
        return len(self.generators)

    @property
    def n(self):
        return self.matrix.shape[0]

    def families(self):
        counts = {}
        for generator in self.generators:
            counts[generator.family] = counts.get(generator.family, 0) + 1
        return counts

    def __len__(self):
        return len(self.generators)


def corollary_dimension(n, N, nilpotent):
    return 2 * n + N + (2 if nilpotent else 1)


def build_algebra(structure, mode='exact', frequency_tolerance=FREQUENCY_TOLERANCE):
    """Generators of the maximal Lie invariance algebra of x'' = J x.

    Solution fields come first in block order, then commutant fields in
    kernel pivot order, then d/dt, then the dilation when J is nilpotent.
    ``frequency_tolerance`` merges numeric solution frequencies.
    """
    if structure.is_scalar():
        raise ScalarSystemError('scalar matrix: use the free-system algebra')
    # Rotation blocks always give numeric generators, so only Jordan blocks need rational eigenvalues.
    if mode == 'exact' and not all(is_exact_value(b.eigenvalue) for b in structure.blocks):
        raise ExactnessError('irrational eigenvalues: exact generators need rational eigenvalues, use --mode numeric')
    numeric = mode == 'numeric' or bool(structure.rotations)
    if mode == 'exact' and structure.rotations:
        logger.warning('rotation blocks give trigonometric solutions, building numeric generators')

    n = structure.n
    solutions = fundamental_system(structure, numeric, frequency_tolerance).solutions
    generators = [VectorField.solution(phi, numeric) for phi in solutions]

    commutant = structure_commutant(structure)
    generators += [VectorField.linear(H, COMMUTANT, numeric=numeric) for H in commutant.matrices]
    generators.append(VectorField.time_translation(n, numeric))

    nilpotent = structure.is_nilpotent()
    if nilpotent:
        generators.append(VectorField.linear(gamma_particular(structure, -2), DILATION, c1=1, numeric=numeric))

    expected = corollary_dimension(n, commutant_count_from_partition(structure.partition()), nilpotent)
    if len(generators) != expected:
        raise ArithmeticError('built {} generators, expected {}'.format(len(generators), expected))

    matrix = jordan_matrix(structure)
    if numeric:
        matrix = as_array(matrix, True)
    classification = NILPOTENT if nilpotent else NON_NILPOTENT
    logger.debug('algebra of %s: dimension %d, N = %d', structure, len(generators), commutant.N)
    return SymmetryAlgebra(generators, classification, commutant.N, structure.field, matrix, structure, numeric)


def build_free_algebra(n, field=COMPLEX):
    """The (n + 2)^2 - 1 generators of the symmetry algebra of x'' = 0."""
    if n < 1:
        raise ValueError('n must be positive')
    xs = state_symbols(n)
    zero = [0] * n

    def unit(b, value):
        eta = list(zero)
        eta[b] = value
        return eta

    generators = [ProjectiveVectorField(1, zero)]
    generators += [ProjectiveVectorField(0, unit(a, 1)) for a in range(n)]
    generators.append(ProjectiveVectorField(T, zero))
    generators += [ProjectiveVectorField(xs[a], zero) for a in range(n)]
    generators += [ProjectiveVectorField(0, unit(a, T)) for a in range(n)]
    generators += [ProjectiveVectorField(0, unit(b, xs[a])) for a in range(n) for b in range(n)]
    generators += [ProjectiveVectorField(T * xs[a], [xs[a] * x for x in xs]) for a in range(n)]
    generators.append(ProjectiveVectorField(T ** 2, [T * x for x in xs]))

    return SymmetryAlgebra(generators, FREE, n * n, field, ImmutableMatrix.zeros(n, n))


def free_dimension(n):
    return (n + 2) ** 2 - 1


def dimension_only(D):
    """Dimension, classification and N of the algebra of y'' = D y without building it."""
    n = D.rows
    classification = classify(D)
    if classification == FREE:
        return DimensionReport(free_dimension(n), FREE, n * n, (1,) * n)
    partition = smith_invariant_factors(D).degrees
    N = commutant_count_from_partition(partition)
    return DimensionReport(corollary_dimension(n, N, classification == NILPOTENT), classification, N, partition)


def structure_dimension(structure):
    """dimension_only for a system given by its Jordan structure."""
    n = structure.n
    if structure.is_scalar():
        return DimensionReport(free_dimension(n), FREE, n * n, (1,) * n)
    partition = structure.partition()
    N = commutant_count_from_partition(partition)
    nilpotent = structure.is_nilpotent()
    classification = NILPOTENT if nilpotent else NON_NILPOTENT
    return DimensionReport(corollary_dimension(n, N, nilpotent), classification, N, partition)


def dimension_bounds(n):
    return 3 * n + 1, n * n + 4


def realizable_dimensions(n, min_n=2, max_n=8):
    """Every algebra dimension a non-scalar n x n matrix can produce.

    Each partition of n other than all ones is the invariant factor degree
    list of both a nilpotent and a non-nilpotent matrix.
    """
    if not min_n <= n <= max_n:
        raise ValueError('n must lie in [{}, {}]'.format(min_n, max_n))
    dimensions = set()
    for partition in partitions(n):
        parts = sorted((part for part, count in partition.items() for _ in range(count)), reverse=True)
        if parts == [1] * n:
            continue
        N = commutant_count_from_partition(parts)
        dimensions.add(corollary_dimension(n, N, False))
        dimensions.add(corollary_dimension(n, N, True))
    return dimensions


def missing_intervals(n, min_n=2, max_n=8):
    """Closed intervals of [3n + 1, n^2 + 4] no non-scalar matrix attains."""
    low, high = dimension_bounds(n)
    attained = realizable_dimensions(n, min_n, max_n)
    intervals = []
    for value in range(low, high + 1):
        if value in attained:
            continue
        if intervals and intervals[-1][1] == value - 1:
            intervals[-1][1] = value
        else:
            intervals.append([value, value])
    return [tuple(interval) for interval in intervals]


def next_submaximal_count(n):
    """N for the invariant factor degrees (2, 2, 1, ..., 1)."""
    if n < 4:
        raise ValueError('n must be at least 4')
    N = n * n - 4 * n + 8
    assert N == commutant_count_from_partition([2, 2] + [1] * (n - 4))
    return N


def extremal_family(structure):
    """Name the extremal family a structure belongs to, if any."""
    n = structure.n
    groups = structure.eigenvalue_groups()
    nilpotent = structure.is_nilpotent()
    sizes = [b.size for b in structure.blocks]

    if nilpotent and sorted(sizes, reverse=True) == [2] + [1] * (n - 2):
        return MAXIMAL
    if nilpotent and sizes == [n]:
        return SINGLE_NILPOTENT_BLOCK
    if structure.is_scalar() or nilpotent:
        return None
    if len(groups) == 1 and groups[0][1] == [2] + [1] * (n - 2):
        return SUBMAXIMAL
    if len(groups) == 2 and sorted(len(g[1]) for g in groups) == [1, n - 1] and all(
            size == 1 for _, group_sizes in groups for size in group_sizes):
        return SUBMAXIMAL
    if structure.partition() == (n,):
        return MINIMAL
    return None


def lift_by_similarity(algebra, P):
    """The algebra of x'' = (P J P^-1) x from the algebra of x'' = J x."""
    if algebra.classification == FREE:
        raise ValueError('free-system generators are not in the restricted form')
    if P.shape != (algebra.n, algebra.n) or P.det() == 0:
        raise ValueError('singular similarity matrix')

    P_inverse = P.inv()
    numeric = algebra.numeric
    P_array, P_inverse_array = as_array(P, numeric), as_array(P_inverse, numeric)
    generators = [g.lift(P_array, P_inverse_array) for g in algebra.generators]

    if numeric:
        matrix = P_array.dot(as_array(algebra.matrix, True)).dot(P_inverse_array)
    else:
        matrix = ImmutableMatrix(P * algebra.matrix * P_inverse)
    return SymmetryAlgebra(generators, algebra.classification, algebra.N, algebra.field, matrix,
                           None, numeric)
