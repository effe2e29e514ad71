"""Exact scalars, polynomials and the rational linear algebra kernels.

Rational scalars are sympy ``Rational`` values, univariate polynomials are
sympy ``Poly`` objects in ``LAMBDA`` over ``QQ`` and dense rational matrices
are ``ImmutableMatrix`` instances.  Elimination runs on ``DomainMatrix`` over
``QQ``.
"""

import logging
import re

import sympy
from sympy import ImmutableMatrix
from sympy import Poly
from sympy import QQ
from sympy import Rational
from sympy import Symbol
from sympy import divisors
from sympy import integer_nthroot
from sympy.core.sympify import CantSympify
from sympy.ntheory.factor_ import core
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

LAMBDA = Symbol('lambda')

RationalScalar = Rational
RatMatrix = ImmutableMatrix

RATIONAL_RE = re.compile(r'^[+-]?\d+(/\d+)?$')
DECIMAL_RE = re.compile(r'^[+-]?(\d+\.\d*|\.\d+)([eE][+-]?\d+)?$')


def parse_rational(text):
    """Parse an integer, "p/q" or decimal string into an exact Rational."""
    if isinstance(text, bool):
        raise ValueError('not a rational: {!r}'.format(text))
    if isinstance(text, int):
        return Rational(text)
    if isinstance(text, Rational):
        return text
    if not isinstance(text, str):
        raise ValueError('not a rational: {!r}'.format(text))

    value = text.strip()
    if RATIONAL_RE.match(value):
        if '/' in value and int(value.split('/')[1]) == 0:
            raise ValueError('zero denominator: {!r}'.format(text))
        return Rational(value)
    if DECIMAL_RE.match(value):
        return Rational(value)

    raise ValueError('not a rational: {!r}'.format(text))


def rat_matrix(rows):
    """Build an exact matrix from nested lists of rationals or rational strings."""
    rows = [list(row) for row in rows]
    if not rows or not rows[0]:
        raise ValueError('matrix must not be empty')
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError('matrix rows differ in length')

    return ImmutableMatrix([[parse_rational(e) for e in row] for row in rows])


def identity(n):
    return ImmutableMatrix(sympy.eye(n))


def _domain_matrix(M):
    rows = [[QQ.from_sympy(sympy.sympify(M[i, j])) for j in range(M.cols)] for i in range(M.rows)]
    return DomainMatrix(rows, M.shape, QQ)


def _rref(M):
    if M.rows == 0:
        return ImmutableMatrix.zeros(0, M.cols), ()
    reduced, pivots = _domain_matrix(M).rref()
    return reduced.to_Matrix(), tuple(pivots)


def rank(M):
    """Exact rank of a rational matrix."""
    return len(_rref(M)[1])


def kernel_basis(M):
    """Right nullspace of ``M``.

    Vectors are tuples of Rationals ordered by their free column, each scaled
    so that its first nonzero entry is 1.
    """
    reduced, pivots = _rref(M)
    free = [j for j in range(M.cols) if j not in pivots]

    basis = []
    for f in free:
        vector = [Rational(0)] * M.cols
        vector[f] = Rational(1)
        for row, pivot in enumerate(pivots):
            vector[pivot] = -reduced[row, f]
        lead = next(v for v in vector if v != 0)
        basis.append(tuple(v / lead for v in vector))

    return basis


def solve_linear(M, b):
    """One exact solution of ``M x = b`` with free parameters set to 0, or None."""
    try:
        x, params = ImmutableMatrix(M).gauss_jordan_solve(ImmutableMatrix(b))
    except ValueError:
        return None

    if params.shape[0]:
        x = x.subs({p: 0 for p in params})
    return ImmutableMatrix(x)


def poly(expr):
    return Poly(expr, LAMBDA, domain=QQ)


def poly_gcd(p, q):
    """Monic greatest common divisor of two polynomials."""
    if p.is_zero and q.is_zero:
        raise ValueError('gcd undefined')
    return p.gcd(q).monic()


def charpoly(D):
    """det(lambda E - D) as a Poly in LAMBDA."""
    return poly(D.charpoly(LAMBDA).as_expr())


def _root_candidates(p):
    _, integral = p.clear_denoms()
    coeffs = [int(c) for c in integral.all_coeffs()]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()

    candidates = {Rational(0)} if len(coeffs) < len(integral.all_coeffs()) else set()
    for a in divisors(abs(coeffs[-1])):
        for b in divisors(abs(coeffs[0])):
            candidates.add(Rational(a, b))
            candidates.add(Rational(-a, b))

    return sorted(candidates)


def factor_rational_roots(p):
    """Split off every rational root of ``p``.

    Returns the sorted list of (root, multiplicity) pairs and the monic
    cofactor that has no rational roots.
    """
    if p.is_zero:
        raise ValueError('polynomial must be nonzero')

    roots = {}
    residual = poly(1)
    _, factors = p.sqf_list()
    for factor, multiplicity in factors:
        rest = factor
        for root in _root_candidates(factor):
            if rest.degree() > 0 and rest.eval(root) == 0:
                roots[root] = roots.get(root, 0) + multiplicity
                rest = rest.exquo(poly(LAMBDA - root))
        residual *= rest ** multiplicity

    return sorted(roots.items()), residual.monic()


class QuadExtScalar(CantSympify):
    """An element ``base + radical * sqrt(radicand)`` of a quadratic extension.

    The radicand is kept as a square-free integer; 0 marks a plain rational.
    Values over different radicands can only meet when one of them is
    rational.
    """

    __slots__ = ('base', 'radical', 'radicand')

    def __init__(self, base=0, radical=0, radicand=0):
        base = Rational(base)
        radical = Rational(radical)
        radicand = Rational(radicand)

        if radical == 0 or radicand == 0:
            radical, radicand = Rational(0), Rational(0)
        else:
            # sqrt(p/q) = sqrt(p*q) / q
            radical /= radicand.q
            whole = radicand.p * radicand.q
            square_free = core(abs(whole)) * (1 if whole > 0 else -1)
            root, exact = integer_nthroot(abs(whole) // abs(square_free), 2)
            assert exact
            radical *= root
            if square_free == 1:
                base += radical
                radical, square_free = Rational(0), 0
            radicand = Rational(square_free)

        self.base = base
        self.radical = radical
        self.radicand = radicand

    @classmethod
    def sqrt(cls, value):
        """Principal square root of a rational."""
        return cls(0, 1, value)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(Rational(value))

    @classmethod
    def parse(cls, text):
        match = re.match(r'^\s*(?P<base>[^ ]+) \+ (?P<radical>[^*]+)\*sqrt\((?P<radicand>-?\d+)\)\s*$', text)
        if not match:
            return cls(parse_rational(text))
        return cls(parse_rational(match.group('base')),
                   parse_rational(match.group('radical')),
                   parse_rational(match.group('radicand')))

    def is_rational(self):
        return self.radical == 0

    def _common(self, other):
        other = QuadExtScalar.coerce(other)
        if self.radicand == 0 or other.radicand == 0 or self.radicand == other.radicand:
            return other, self.radicand if self.radicand != 0 else other.radicand
        raise ValueError('mixed radicands sqrt({}) and sqrt({})'.format(self.radicand, other.radicand))

    def __add__(self, other):
        try:
            other, d = self._common(other)
        except TypeError:
            return NotImplemented
        return QuadExtScalar(self.base + other.base, self.radical + other.radical, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar(-self.base, -self.radical, self.radicand)

    def __sub__(self, other):
        return self + (-QuadExtScalar.coerce(other))

    def __rsub__(self, other):
        return QuadExtScalar.coerce(other) + (-self)

    def __mul__(self, other):
        try:
            other, d = self._common(other)
        except TypeError:
            return NotImplemented
        return QuadExtScalar(self.base * other.base + self.radical * other.radical * d,
                             self.base * other.radical + self.radical * other.base, d)

    __rmul__ = __mul__

    def norm(self):
        return self.base ** 2 - self.radical ** 2 * self.radicand

    def inverse(self):
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError('division by zero in quadratic extension')
        return QuadExtScalar(self.base / norm, -self.radical / norm, self.radicand)

    def __truediv__(self, other):
        return self * QuadExtScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadExtScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError('only nonnegative integer powers')
        result = QuadExtScalar(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self):
        """Complex conjugate; the identity on real values."""
        if self.radicand < 0:
            return QuadExtScalar(self.base, -self.radical, self.radicand)
        return self

    def __eq__(self, other):
        try:
            other = QuadExtScalar.coerce(other)
        except (TypeError, ValueError, sympy.SympifyError):
            return NotImplemented
        return (self.base == other.base and self.radical == other.radical and
                self.radicand == other.radicand)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        if self.radical == 0:
            return hash(self.base)
        return hash((self.base, self.radical, self.radicand))

    def __bool__(self):
        return self.base != 0 or self.radical != 0

    def __complex__(self):
        if self.radical == 0:
            return complex(float(self.base), 0.0)
        root = float(abs(self.radicand)) ** 0.5
        if self.radicand < 0:
            return complex(float(self.base), float(self.radical) * root)
        return complex(float(self.base) + float(self.radical) * root, 0.0)

    def __abs__(self):
        return abs(complex(self))

    def to_sympy(self):
        return self.base + self.radical * sympy.sqrt(self.radicand)

    def __str__(self):
        if self.radical == 0:
            return str(self.base)
        return '{} + {}*sqrt({})'.format(self.base, self.radical, self.radicand)

    def __repr__(self):
        return 'QuadExtScalar({})'.format(self)


def exact_scalar(value):
    """Normalize an exact scalar: plain Rationals stay Rationals."""
    if isinstance(value, QuadExtScalar):
        return value.base if value.is_rational() else value
    return Rational(value)


def to_sympy(value):
    if isinstance(value, QuadExtScalar):
        return value.to_sympy()
    return sympy.sympify(value)


def sort_key(value):
    """Deterministic ordering for exact or numeric scalars."""
    z = complex(value)
    return (z.real, z.imag, str(value))


class EchelonBasis(object):
    """Incremental sparse reduced row echelon form.

    Vectors are dictionaries from hashable coordinates to exact scalars.  Each
    stored row has its pivot normalized to 1 and every pivot is eliminated
    from all other rows, so one pass reduces a vector completely.
    """

    def __init__(self):
        self.rows = []

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vector):
        remainder = {k: v for k, v in vector.items() if v != 0}
        for pivot, row in self.rows:
            c = remainder.get(pivot)
            if c is None:
                continue
            for key, value in row.items():
                updated = remainder.get(key, 0) - c * value
                if updated == 0:
                    remainder.pop(key, None)
                else:
                    remainder[key] = updated
        return remainder

    def contains(self, vector):
        return not self.reduce(vector)

    def add(self, vector):
        """Add a vector; return False when it was already in the span."""
        remainder = self.reduce(vector)
        if not remainder:
            return False

        pivot = next(iter(remainder))
        scale = remainder[pivot]
        remainder = {k: v / scale for k, v in remainder.items()}

        for index, (row_pivot, row) in enumerate(self.rows):
            c = row.get(pivot)
            if c is None:
                continue
            for key, value in remainder.items():
                updated = row.get(key, 0) - c * value
                if updated == 0:
                    row.pop(key, None)
                else:
                    row[key] = updated

        self.rows.append((pivot, remainder))
        return True


def exact_rank(vectors):
    """Rank of exact vectors given as sequences or coordinate dictionaries."""
    basis = EchelonBasis()
    for vector in vectors:
        if not isinstance(vector, dict):
            vector = dict(enumerate(vector))
        basis.add(vector)
    return basis.rank
