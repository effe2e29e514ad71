"""Independent checks of emitted generators.

The full invariance condition is assembled symbolically from the jets of
xi and eta and evaluated at seeded sample points; restricted fields are
also checked through the reduced closed form and, for debugging, through
central finite differences.
"""

from collections import namedtuple
import logging

import numpy
import sympy

from linsym.algebra import T
from linsym.algebra import as_array
from linsym.algebra import state_symbols
from linsym.algebra import velocity_symbols
from linsym.commutant import commutant_basis
from linsym.exact import EchelonBasis
from linsym.exact import to_sympy
from linsym.exppoly import apply_matrix
from linsym.structure import commutant_count_from_divisors
from linsym.structure import commutant_count_from_partition
from linsym.structure import elementary_divisors
from linsym.structure import smith_invariant_factors

logger = logging.getLogger(__name__)

SamplePoint = namedtuple('SamplePoint', ['t', 'x', 'v'])
CommutantCounts = namedtuple('CommutantCounts', ['kernel', 'partition', 'divisors'])

VELOCITY_DEGREES = {
    2: 'quadratic velocity terms',
    1: 'linear velocity terms',
    0: 'velocity-free terms',
}


class DimensionMismatchError(ValueError):
    pass


def sample_points(n, count=20, seed=0):
    """Seeded points with t, x and v uniform in [-1, 1]."""
    rng = numpy.random.default_rng(seed)
    points = []
    for _ in range(count):
        t = rng.uniform(-1, 1)
        x = rng.uniform(-1, 1, n)
        v = rng.uniform(-1, 1, n)
        points.append(SamplePoint(t, x, v))
    return points


def _sympy_matrix(J):
    if isinstance(J, sympy.MatrixBase):
        return sympy.Matrix(J)
    return sympy.Matrix([[sympy.sympify(complex(v)) for v in row] for row in J.tolist()])


def _check_dimensions(Q, J):
    if Q.n != J.shape[0] or J.shape[0] != J.shape[1]:
        raise DimensionMismatchError('vector field acts on {} variables, system has {}'.format(Q.n, J.shape[0]))


def invariance_expressions(Q, J):
    """Components of the invariance condition of Q for x'' = J x.

    eta_tt + 2 eta_{x t} v + eta_{x x} v v + eta_x (J x)
      - (xi_tt + 2 xi_{x t} v + xi_{x x} v v + xi_x (J x)) v
      - 2 (xi_t + xi_x v) (J x) - J eta
    """
    _check_dimensions(Q, J)
    n = Q.n
    t, xs, vs = T, state_symbols(n), velocity_symbols(n)
    M = _sympy_matrix(J)
    xi, eta = Q.expressions(t, xs)
    Jx = M * sympy.Matrix(xs)
    J_eta = M * sympy.Matrix(eta)

    def second_total(f):
        total = sympy.diff(f, t, 2)
        for a in range(n):
            total += 2 * sympy.diff(f, xs[a], t) * vs[a]
            total += sympy.diff(f, xs[a]) * Jx[a]
            for c in range(n):
                total += sympy.diff(f, xs[a], xs[c]) * vs[a] * vs[c]
        return total

    xi_total = second_total(xi)
    xi_first = sympy.diff(xi, t) + sum(sympy.diff(xi, xs[a]) * vs[a] for a in range(n))
    return [second_total(eta[b]) - xi_total * vs[b] - 2 * xi_first * Jx[b] - J_eta[b] for b in range(n)]


def symbolic_residual(Q, J):
    """Expanded full invariance condition."""
    return [sympy.expand(expression) for expression in invariance_expressions(Q, J)]


def exact_residual(Q, J):
    """Residual components, all zero iff Q is a symmetry of x'' = J x.

    Restricted fields use the reduced form (phi'' - J phi) + (H J - J H - 2 c1 J) x
    in exact exp-polynomial arithmetic, projective fields the expanded full
    condition.
    """
    _check_dimensions(Q, J)
    if not Q.restricted:
        return symbolic_residual(Q, J)
    if Q.numeric or not isinstance(J, sympy.MatrixBase):
        raise ValueError('exact residual needs an exact field and an exact matrix')

    M = as_array(J, False)
    linear = Q.H.dot(M) - M.dot(Q.H) - M * (2 * Q.c1)
    image = apply_matrix(M, Q.drift)
    xs = state_symbols(Q.n)
    components = []
    for b, phi in enumerate(Q.drift):
        drift = phi.differentiate().differentiate() - image[b]
        components.append(drift.to_sympy(T) + sympy.Add(*[to_sympy(linear[b, a]) * xs[a] for a in range(Q.n)]))
    return components


def exact_agreement(Q, J):
    """True when the full and the reduced residual coincide symbolically."""
    full = symbolic_residual(Q, J)
    reduced = exact_residual(Q, J) if Q.restricted else full
    return all(sympy.expand(a - b) == 0 for a, b in zip(full, reduced))


def _evaluator(expressions, n):
    args = [T] + list(state_symbols(n)) + list(velocity_symbols(n))
    function = sympy.lambdify(args, expressions, modules='numpy')

    def evaluate(point):
        values = function(point.t, *point.x, *point.v)
        return numpy.array([complex(v) for v in values])

    return evaluate


def residual(Q, J, pts):
    """Full jet residual vector at every sample point."""
    evaluate = _evaluator(invariance_expressions(Q, J), Q.n)
    return [evaluate(point) for point in pts]


def reduced_residual(Q, J, pts):
    """(phi'' - J phi)(t) + (H J - J H - 2 c1 J) x for a restricted field."""
    _check_dimensions(Q, J)
    if not Q.restricted:
        raise TypeError('reduced residual needs a restricted vector field')
    M = as_array(J, True)
    H = as_array(Q.H, True)
    linear = H.dot(M) - M.dot(H) - 2 * complex(Q.c1) * M
    second = [phi.differentiate().differentiate() for phi in Q.drift]

    result = []
    for point in pts:
        phi = numpy.array([p.evaluate(point.t) for p in Q.drift])
        phi_tt = numpy.array([p.evaluate(point.t) for p in second])
        result.append(phi_tt - M.dot(phi) + linear.dot(numpy.asarray(point.x, dtype=complex)))
    return result


def finite_difference_residual(Q, J, pts, step=1e-5):
    """The invariance condition with every jet replaced by a central difference."""
    _check_dimensions(Q, J)
    n = Q.n
    xs = state_symbols(n)
    xi_expression, eta_expressions = Q.expressions(T, xs)
    function = sympy.lambdify([T] + list(xs), [xi_expression] + list(eta_expressions), modules='numpy')
    M = as_array(J, True)
    h = step

    def f(t, x):
        return numpy.array([complex(v) for v in function(t, *x)])

    def shift(x, a, amount):
        y = numpy.array(x, dtype=float)
        y[a] += amount
        return y

    result = []
    for point in pts:
        t, x, v = point.t, numpy.asarray(point.x, dtype=float), numpy.asarray(point.v, dtype=float)
        centre = f(t, x)
        f_t = (f(t + h, x) - f(t - h, x)) / (2 * h)
        f_tt = (f(t + h, x) - 2 * centre + f(t - h, x)) / (h * h)
        f_x = [(f(t, shift(x, a, h)) - f(t, shift(x, a, -h))) / (2 * h) for a in range(n)]
        f_xt = [(f(t + h, shift(x, a, h)) - f(t + h, shift(x, a, -h)) -
                 f(t - h, shift(x, a, h)) + f(t - h, shift(x, a, -h))) / (4 * h * h) for a in range(n)]
        f_xx = [[(f(t, shift(shift(x, a, h), c, h)) - f(t, shift(shift(x, a, h), c, -h)) -
                  f(t, shift(shift(x, a, -h), c, h)) + f(t, shift(shift(x, a, -h), c, -h))) / (4 * h * h)
                 for c in range(n)] for a in range(n)]

        Jx = M.dot(x)
        total = f_tt + sum(2 * f_xt[a] * v[a] + f_x[a] * Jx[a] for a in range(n))
        total = total + sum(f_xx[a][c] * v[a] * v[c] for a in range(n) for c in range(n))
        xi_total, eta_total = total[0], total[1:]
        xi_first = f_t[0] + sum(f_x[a][0] * v[a] for a in range(n))
        result.append(eta_total - xi_total * v - 2 * xi_first * Jx - M.dot(centre[1:]))
    return result


def residual_agreement(Q, J, pts):
    """Largest difference between the full and the reduced residual."""
    full = residual(Q, J, pts)
    reduced = reduced_residual(Q, J, pts)
    return max((float(numpy.abs(a - b).max()) for a, b in zip(full, reduced)), default=0.0)


def determining_equations(Q, J, pts=None, tolerance=1e-9):
    """Labels of the velocity-degree parts of the invariance condition Q violates.

    Exact fields are checked symbolically, numeric ones at ``pts``.
    """
    n = Q.n
    vs = velocity_symbols(n)
    parts = {degree: [] for degree in VELOCITY_DEGREES}
    for expression in invariance_expressions(Q, J):
        polynomial = sympy.Poly(sympy.expand(expression), *vs)
        for monomial, coefficient in polynomial.terms():
            parts[sum(monomial)].append(coefficient)

    violated = []
    for degree in sorted(VELOCITY_DEGREES, reverse=True):
        coefficients = parts[degree]
        if Q.numeric or pts is not None:
            points = pts or sample_points(n)
            evaluate = _evaluator(coefficients, n) if coefficients else None
            bad = evaluate is not None and any(numpy.abs(evaluate(p)).max() > tolerance for p in points)
        else:
            bad = any(sympy.expand(c) != 0 for c in coefficients)
        if bad:
            violated.append(VELOCITY_DEGREES[degree])
    return violated


def lie_bracket(Q1, Q2):
    return Q1.bracket(Q2)


def _is_exact(fields):
    return not any(field.numeric for field in fields)


def _feature_points(n, count, seed):
    rng = numpy.random.default_rng(seed + 7919)
    return [(rng.uniform(-1, 1), rng.uniform(-1, 1, n)) for _ in range(count)]


def _features(field, points):
    values = []
    for t, x in points:
        xi, eta = field.evaluate(t, x)
        values.append(xi)
        values.extend(eta)
    return numpy.array(values, dtype=complex)


class SpanOracle(object):
    """Span membership over generator coordinates (exact) or sampled values (numeric)."""

    def __init__(self, generators, tolerance=1e-8, seed=0):
        self.generators = list(generators)
        self.tolerance = tolerance
        self.seed = seed
        self.exact = _is_exact(self.generators)
        self.matrix = None
        if self.exact:
            self.basis = EchelonBasis()
            for generator in self.generators:
                self.basis.add(generator.coordinates())

    def _sample(self):
        if self.matrix is None:
            n = self.generators[0].n
            self.points = _feature_points(n, max(20, 2 * len(self.generators) + 5), self.seed)
            self.matrix = numpy.array([_features(g, self.points) for g in self.generators]).T
        return self.matrix

    def rank(self):
        if self.exact:
            return self.basis.rank
        matrix = self._sample()
        scale = max(1.0, numpy.abs(matrix).max())
        return int(numpy.linalg.matrix_rank(matrix, tol=self.tolerance * scale))

    def contains(self, field):
        if self.exact and not field.numeric:
            return self.basis.contains(field.coordinates())
        matrix = self._sample()
        target = _features(field, self.points)
        coefficients, _, _, _ = numpy.linalg.lstsq(matrix, target, rcond=None)
        error = numpy.abs(matrix.dot(coefficients) - target).max()
        return error <= self.tolerance * max(1.0, numpy.abs(target).max())


def in_span(algebra, Q, tolerance=1e-8):
    return SpanOracle(algebra.generators, tolerance).contains(Q)


def bracket_table(algebra):
    """Brackets of all generator pairs i < j."""
    generators = algebra.generators
    return {(i, j): lie_bracket(generators[i], generators[j])
            for i in range(len(generators)) for j in range(i + 1, len(generators))}


def closure_failures(algebra, tolerance=1e-8):
    """Generator pairs whose bracket leaves the span."""
    oracle = SpanOracle(algebra.generators, tolerance)
    return [pair for pair, bracket in sorted(bracket_table(algebra).items()) if not oracle.contains(bracket)]


def closure_check(algebra, tolerance=1e-8):
    failures = closure_failures(algebra, tolerance)
    if failures:
        logger.debug('brackets outside the span: %s', failures[:10])
    return not failures


def bracket_span_ranks(algebra, tolerance=1e-8):
    """Rank of the generators and of the generators together with all brackets."""
    brackets = list(bracket_table(algebra).values())
    generators = SpanOracle(algebra.generators, tolerance)
    extended = SpanOracle(algebra.generators + brackets, tolerance)
    return generators.rank(), extended.rank()


def cross_check_N(D):
    """N from the commutant kernel, from the invariant factor degrees and from the divisors."""
    kernel = commutant_basis(D).N
    data = smith_invariant_factors(D)
    partition = commutant_count_from_partition(data.degrees)
    divisors = elementary_divisors(data)
    by_divisors = commutant_count_from_divisors(divisors) if divisors is not None else None
    return CommutantCounts(kernel, partition, by_divisors)


class VerificationReport(object):
    def __init__(self, residuals, exact_zero, tolerance, seed, samples, exact,
                 agreement=None, closure=None, counts=None, finite_differences=None):
        self.residuals = residuals
        self.exact_zero = exact_zero
        self.tolerance = tolerance
        self.seed = seed
        self.samples = samples
        self.exact = exact
        self.agreement = agreement
        self.closure = closure
        self.counts = counts
        self.finite_differences = finite_differences

    def generator_passed(self, index):
        if self.exact:
            return self.exact_zero[index]
        return self.residuals[index] <= self.tolerance

    def failures(self):
        return [i for i in range(len(self.residuals)) if not self.generator_passed(i)]

    @property
    def counts_agree(self):
        if self.counts is None:
            return True
        values = [c for c in self.counts if c is not None]
        return len(set(values)) == 1

    @property
    def passed(self):
        return not self.failures() and self.closure is not False and self.counts_agree


def verify_algebra(algebra, J=None, samples=20, seed=0, tolerance=1e-9, span_tolerance=1e-8,
                   closure=True, D=None, fd_step=None):
    """Residuals of every generator, two-path agreement, closure and the N cross-check.

    With ``fd_step`` the largest central-difference residual is reported too.
    """
    J = algebra.matrix if J is None else J
    pts = sample_points(algebra.n, samples, seed)
    exact = _is_exact(algebra.generators)

    residuals, exact_zero, agreement = [], [], 0.0
    finite_differences = 0.0 if fd_step is not None else None
    for index, generator in enumerate(algebra.generators):
        values = residual(generator, J, pts)
        residuals.append(max(float(numpy.abs(v).max()) for v in values))
        if exact:
            exact_zero.append(all(e == 0 for e in exact_residual(generator, J)))
        if generator.restricted:
            reduced = reduced_residual(generator, J, pts)
            agreement = max(agreement, max(float(numpy.abs(a - b).max()) for a, b in zip(values, reduced)))
        if fd_step is not None:
            differences = finite_difference_residual(generator, J, pts, fd_step)
            finite_differences = max(finite_differences, max(float(numpy.abs(v).max()) for v in differences))
        logger.debug('generator %d: max residual %g', index, residuals[-1])

    closed = closure_check(algebra, span_tolerance) if closure else None
    counts = cross_check_N(D) if D is not None else None
    return VerificationReport(residuals, exact_zero, tolerance, seed, samples, exact,
                              agreement, closed, counts, finite_differences)
