"""Finite sums of c * t^k * exp(mu * t) and fundamental systems of x'' = J x.

Exact exp-polynomials carry Rational or QuadExtScalar coefficients and
frequencies; numeric ones carry Python complex numbers and merge
frequencies that agree within a tolerance.
"""

import cmath
import logging

import numpy
import sympy
from sympy import Rational

from linsym.exact import QuadExtScalar
from linsym.exact import exact_rank
from linsym.exact import exact_scalar
from linsym.exact import sort_key
from linsym.exact import to_sympy
from linsym.structure import REAL
from linsym.structure import is_exact_value
from linsym.structure import jordan_matrix

logger = logging.getLogger(__name__)

FREQUENCY_TOLERANCE = 1e-12
COEFFICIENT_FLOOR = 1e-14
SUBSTITUTION_TOLERANCE = 1e-10


def _is_zero(value, numeric):
    if numeric:
        return abs(value) <= COEFFICIENT_FLOOR
    return value == 0


class ExpPoly(object):
    __slots__ = ('terms', 'numeric', 'tolerance')

    def __init__(self, terms=(), numeric=False, tolerance=FREQUENCY_TOLERANCE):
        self.numeric = numeric
        self.tolerance = tolerance
        self.terms = self._canonical(terms)

    def _canonical(self, terms):
        merged = []
        index = {}
        for coefficient, power, frequency in terms:
            if self.numeric:
                coefficient, frequency = complex(coefficient), complex(frequency)
                key = next((k for k in index if k[0] == power and abs(k[1] - frequency) <= self.tolerance), None)
                if key is None:
                    key = (power, frequency)
            else:
                coefficient, frequency = exact_scalar(coefficient), exact_scalar(frequency)
                key = (power, frequency)
            if key in index:
                merged[index[key]][0] += coefficient
            else:
                index[key] = len(merged)
                merged.append([coefficient, key[0], key[1]])

        canonical = [(exact_scalar(c) if not self.numeric else c, p, f)
                     for c, p, f in merged if not _is_zero(c, self.numeric)]
        return tuple(sorted(canonical, key=lambda term: (sort_key(term[2]), term[1])))

    @classmethod
    def monomial(cls, coefficient, power=0, frequency=0, numeric=False, tolerance=FREQUENCY_TOLERANCE):
        return cls([(coefficient, power, frequency)], numeric, tolerance)

    @classmethod
    def zero(cls, numeric=False):
        return cls((), numeric)

    def _like(self, terms, numeric=None):
        return ExpPoly(terms, self.numeric if numeric is None else numeric, self.tolerance)

    def to_numeric(self):
        if self.numeric:
            return self
        return ExpPoly([(complex(c), p, complex(f)) for c, p, f in self.terms], True, self.tolerance)

    def _align(self, other):
        if self.numeric or other.numeric:
            return self.to_numeric(), other.to_numeric()
        return self, other

    def __add__(self, other):
        a, b = self._align(other)
        return a._like(a.terms + b.terms)

    def __neg__(self):
        return self._like([(-c, p, f) for c, p, f in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        if self.numeric:
            factor = complex(factor)
        return self._like([(factor * c, p, f) for c, p, f in self.terms])

    def times_t(self):
        return self._like([(c, p + 1, f) for c, p, f in self.terms])

    def differentiate(self):
        """d/dt [c t^k e^{mu t}] = c k t^(k-1) e^{mu t} + c mu t^k e^{mu t}."""
        terms = []
        for c, p, f in self.terms:
            if p > 0:
                terms.append((c * p, p - 1, f))
            terms.append((c * f, p, f))
        return self._like(terms)

    def conjugate(self):
        if self.numeric:
            return self._like([(c.conjugate(), p, f.conjugate()) for c, p, f in self.terms])
        return self._like([(_conjugate(c), p, _conjugate(f)) for c, p, f in self.terms])

    def is_zero(self):
        return not self.terms

    def max_abs_coefficient(self):
        return max((abs(complex(c)) for c, _, _ in self.terms), default=0.0)

    def frequencies(self):
        seen = []
        for _, _, f in self.terms:
            if f not in seen:
                seen.append(f)
        return seen

    def polynomial(self, frequency):
        """Coefficients of the polynomial multiplying exp(frequency * t), lowest power first."""
        coefficients = {}
        for c, p, f in self.terms:
            if self._same_frequency(f, frequency):
                coefficients[p] = c
        degree = max(coefficients, default=-1)
        zero = 0j if self.numeric else Rational(0)
        return [coefficients.get(p, zero) for p in range(degree + 1)]

    def _same_frequency(self, a, b):
        if self.numeric:
            return abs(complex(a) - complex(b)) <= self.tolerance
        return a == b

    def initial_value(self):
        """Value at t = 0."""
        total = 0j if self.numeric else Rational(0)
        for c, p, _ in self.terms:
            if p == 0:
                total = total + c
        return total if self.numeric else exact_scalar(total)

    def evaluate(self, t):
        total = 0j
        for c, p, f in self.terms:
            total += complex(c) * t ** p * cmath.exp(complex(f) * t)
        return total

    def to_sympy(self, t):
        return sympy.Add(*[to_sympy(c) * t ** p * sympy.exp(to_sympy(f) * t) for c, p, f in self.terms])

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(len(self.terms))

    def __str__(self):
        if not self.terms:
            return '0'
        parts = []
        for c, p, f in self.terms:
            factors = ['({})'.format(c)]
            if p:
                factors.append('t' if p == 1 else 't^{}'.format(p))
            if not _is_zero(f, self.numeric):
                factors.append('exp(({})*t)'.format(f))
            parts.append('*'.join(factors))
        return ' + '.join(parts)

    __repr__ = __str__


def _conjugate(value):
    if isinstance(value, QuadExtScalar):
        return exact_scalar(value.conjugate())
    return value


def solve_resonant(lam, f, tolerance=FREQUENCY_TOLERANCE):
    """A particular solution g of g'' - lam g = f.

    Every frequency nu of ``f`` must be 0 or satisfy nu^2 = lam.  The
    polynomial ansatz q(t) exp(nu t) reduces to q'' + 2 nu q' + (nu^2 - lam) q = p,
    solved by back-substitution from the top degree; resonant frequencies
    raise the ansatz degree by one or two.
    """
    numeric = f.numeric or not is_exact_value(lam) and not isinstance(lam, QuadExtScalar)
    if numeric:
        f = f.to_numeric()
        lam = complex(lam)

    terms = []
    for nu in f.frequencies():
        p = f.polynomial(nu)
        d = len(p) - 1
        c = nu * nu - lam
        if numeric:
            resonant = abs(c) <= tolerance * max(1.0, abs(lam))
            zero_frequency = abs(nu) <= tolerance
        else:
            resonant = c == 0
            zero_frequency = nu == 0
        if not resonant and not zero_frequency:
            raise ValueError('frequency outside block closure: {}'.format(nu))

        if not resonant:
            q = [0] * (d + 3)
            for k in range(d, -1, -1):
                q[k] = (p[k] - 2 * nu * (k + 1) * q[k + 1] - (k + 2) * (k + 1) * q[k + 2]) / c
            q = q[:d + 1]
        elif not zero_frequency:
            r = [0] * (d + 2)
            for k in range(d, -1, -1):
                r[k] = (p[k] - (k + 1) * r[k + 1]) / (2 * nu)
            q = [0] + [r[k] / (k + 1) for k in range(d + 1)]
        else:
            q = [0, 0] + [p[k] / ((k + 1) * (k + 2)) for k in range(d + 1)]

        terms.extend((coefficient, power, nu) for power, coefficient in enumerate(q))

    g = ExpPoly(terms, numeric, tolerance)
    check = g.differentiate().differentiate() - g.scale(lam) - f
    if numeric:
        scale = max(1.0, f.max_abs_coefficient())
        if check.max_abs_coefficient() > SUBSTITUTION_TOLERANCE * scale:
            raise ArithmeticError('resonant solve failed substitution check')
    elif not check.is_zero():
        raise ArithmeticError('resonant solve failed substitution check')
    return g


def apply_matrix(M, vector):
    """M times a vector of ExpPoly."""
    n = len(vector)
    numeric = any(component.numeric for component in vector) or getattr(M, 'dtype', object) != object
    result = []
    for b in range(n):
        total = ExpPoly.zero(numeric)
        for a in range(n):
            entry = M[b, a]
            if entry != 0:
                total = total + (vector[a].to_numeric() if numeric else vector[a]).scale(entry)
        result.append(total)
    return tuple(result)


class FundamentalSystem(object):
    """2n exp-polynomial vector solutions of x'' = J x."""

    def __init__(self, solutions, matrix, numeric):
        self.solutions = solutions
        self.matrix = matrix
        self.numeric = numeric

    def __len__(self):
        return len(self.solutions)

    def initial_data(self):
        rows = []
        for phi in self.solutions:
            rows.append([c.initial_value() for c in phi] + [c.differentiate().initial_value() for c in phi])
        return rows

    def is_nonsingular(self):
        rows = self.initial_data()
        if self.numeric:
            data = numpy.array(rows, dtype=complex)
            return numpy.linalg.matrix_rank(data, tol=1e-9 * max(1.0, numpy.abs(data).max())) == len(rows)
        return exact_rank(rows) == len(rows)

    def residuals(self):
        """phi'' - J phi for every solution."""
        result = []
        for phi in self.solutions:
            second = tuple(c.differentiate().differentiate() for c in phi)
            image = apply_matrix(self.matrix, phi)
            result.append(tuple(s - j for s, j in zip(second, image)))
        return result


def _seeds(lam, numeric, tolerance):
    if lam == 0:
        return [ExpPoly.monomial(1, 0, 0, numeric, tolerance), ExpPoly.monomial(1, 1, 0, numeric, tolerance)]
    mu = cmath.sqrt(complex(lam)) if numeric else exact_scalar(QuadExtScalar.sqrt(lam))
    return [ExpPoly.monomial(1, 0, mu, numeric, tolerance), ExpPoly.monomial(1, 0, -mu, numeric, tolerance)]


def jordan_block_solutions(lam, size, numeric=False, tolerance=FREQUENCY_TOLERANCE):
    """2 * size solutions of one Jordan block, seeded at each component in turn."""
    solutions = []
    for seed_index in range(size):
        for seed in _seeds(lam, numeric, tolerance):
            components = [ExpPoly((), numeric, tolerance)] * size
            components[seed_index] = seed
            for b in range(seed_index - 1, -1, -1):
                components[b] = solve_resonant(lam, components[b + 1], tolerance)
            solutions.append(components)
    return solutions


def _real_parts(solutions, lam, numeric):
    """Replace each pair seeded by exp(+-mu t) with the real and imaginary parts."""
    mu = cmath.sqrt(complex(lam)) if numeric else exact_scalar(QuadExtScalar.sqrt(lam))
    inverse = 1 / (2 * mu)
    half = 0.5 if numeric else Rational(1, 2)
    result = []
    for index in range(0, len(solutions), 2):
        f = solutions[index]
        conj = [c.conjugate() for c in f]
        result.append([(a + b).scale(half) for a, b in zip(f, conj)])
        result.append([(a - b).scale(inverse) for a, b in zip(f, conj)])
    return result


def _rotation_solutions(mu, nu, size, tolerance=FREQUENCY_TOLERANCE):
    """4 * size real solutions of a rotation block from its complex Jordan block.

    With w_j = x_{2j} - i x_{2j+1} the block becomes a complex Jordan block
    with eigenvalue mu + i nu; both w and i w give a real solution.
    """
    theta = complex(float(mu), float(nu))
    result = []
    for w in jordan_block_solutions(theta, size, True, tolerance):
        for factor in (1, 1j):
            scaled = [c.scale(factor) for c in w]
            x = []
            for component in scaled:
                conj = component.conjugate()
                x.append((component + conj).scale(0.5))
                x.append((component - conj).scale(0.5j))
            result.append(x)
    return result


def _normalize(phi, numeric):
    for value in [c.initial_value() for c in phi] + [c.differentiate().initial_value() for c in phi]:
        if not _is_zero(value, numeric):
            inverse = 1 / complex(value) if numeric else exact_scalar(1 / QuadExtScalar.coerce(value))
            return tuple(c.scale(inverse) for c in phi)
    return tuple(phi)


def fundamental_system(structure, numeric=None, tolerance=FREQUENCY_TOLERANCE):
    """Fundamental system of x'' = J x in the canonical coordinates of ``structure``.

    Exact structures without rotation blocks give exact solutions unless
    ``numeric`` is forced.  Numeric frequencies closer than ``tolerance``
    are merged.
    """
    if numeric is None:
        numeric = not structure.exact or bool(structure.rotations)
    elif not numeric and (structure.rotations or not structure.exact):
        raise ValueError('no exact fundamental system for {}'.format(structure))
    real = structure.field == REAL
    n = structure.n

    local = []
    for r in structure.rotations:
        local.append((2 * r.size, _rotation_solutions(r.mu, r.nu, r.size, tolerance)))
    for block in structure.blocks:
        lam = block.eigenvalue
        solutions = jordan_block_solutions(lam, block.size, numeric, tolerance)
        negative = complex(lam).real < 0 and complex(lam).imag == 0
        if real and negative:
            solutions = _real_parts(solutions, lam, numeric)
        local.append((block.size, solutions))

    solutions = []
    offset = 0
    for width, block_solutions in local:
        for phi in block_solutions:
            vector = [ExpPoly((), numeric, tolerance)] * n
            for j, component in enumerate(phi):
                vector[offset + j] = component.to_numeric() if numeric else component
            solutions.append(_normalize(vector, numeric))
        offset += width

    matrix = jordan_matrix(structure)
    if numeric and isinstance(matrix, sympy.MatrixBase):
        matrix = numpy.array([[complex(v) for v in row] for row in matrix.tolist()], dtype=complex)
    logger.debug('fundamental system with %d solutions for %s', len(solutions), structure)
    return FundamentalSystem(solutions, matrix, numeric)
