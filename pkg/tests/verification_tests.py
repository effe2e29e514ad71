import cmath
import unittest

import numpy
from sympy import ImmutableMatrix

from linsym.algebra import T
from linsym.algebra import ProjectiveVectorField
from linsym.algebra import VectorField
from linsym.algebra import build_algebra
from linsym.algebra import build_free_algebra
from linsym.algebra import state_symbols
from linsym.exact import identity
from linsym.exact import rat_matrix
from linsym.exppoly import ExpPoly
from linsym.exppoly import fundamental_system
from linsym.memoize import memoize_session_reset
from linsym.structure import REAL
from linsym.structure import JordanStructure
from linsym.structure import jordan_matrix
from linsym.verification import DimensionMismatchError
from linsym.verification import SpanOracle
from linsym.verification import bracket_span_ranks
from linsym.verification import closure_check
from linsym.verification import closure_failures
from linsym.verification import cross_check_N
from linsym.verification import determining_equations
from linsym.verification import exact_agreement
from linsym.verification import exact_residual
from linsym.verification import finite_difference_residual
from linsym.verification import in_span
from linsym.verification import residual
from linsym.verification import residual_agreement
from linsym.verification import sample_points
from linsym.verification import verify_algebra

from .corpus import soundness_corpus
from .corpus import structures


def jordan(*blocks):
    return JordanStructure(blocks)


def max_residual(Q, J, pts):
    return max(float(numpy.abs(value).max()) for value in residual(Q, J, pts))


def unit_matrix(n, *entries):
    rows = [[0] * n for _ in range(n)]
    for (i, j), value in entries:
        rows[i][j] = value
    return rat_matrix(rows)


# two coupled oscillators rotating with (mu, nu) = (1, 1) beside a nilpotent pair and a free coordinate
EXAMPLE_ROTATION = JordanStructure([(0, 2), (0, 1)], [(1, 1, 1)], REAL)
EXAMPLE_BLOCKS = jordan((2, 2), (3, 2))


class TestResidual(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()
        self.J = jordan_matrix(EXAMPLE_ROTATION)
        self.pts = sample_points(5)

    def test_sample_points(self):
        pts = sample_points(3, count=7, seed=4)
        self.assertEqual(len(pts), 7)
        for point in pts:
            self.assertTrue(-1 <= point.t <= 1)
            self.assertEqual(len(point.x), 3)
            self.assertTrue(numpy.all(numpy.abs(point.v) <= 1))
        again = sample_points(3, count=7, seed=4)
        self.assertTrue(all(numpy.array_equal(a.x, b.x) for a, b in zip(pts, again)))

    def test_commuting_linear_field(self):
        # x4 d/dx3 commutes with J
        Q = VectorField.linear(unit_matrix(5, ((2, 3), 1)))
        self.assertTrue(all(r == 0 for r in exact_residual(Q, self.J)))
        self.assertLess(max_residual(Q, self.J, self.pts), 1e-12)

    def test_non_commuting_linear_field(self):
        # x3 d/dx4 does not
        Q = VectorField.linear(unit_matrix(5, ((3, 2), 1)))
        self.assertFalse(all(r == 0 for r in exact_residual(Q, self.J)))
        self.assertGreater(max_residual(Q, self.J, self.pts), 0.1)
        self.assertEqual(determining_equations(Q, self.J), ['velocity-free terms'])

    def test_time_translation(self):
        Q = VectorField.time_translation(5)
        self.assertTrue(all(r == 0 for r in exact_residual(Q, self.J)))

    def test_projective_field(self):
        xs = state_symbols(3)
        Q = ProjectiveVectorField(T ** 2, [T * x for x in xs])
        zero = ImmutableMatrix.zeros(3, 3)
        self.assertTrue(all(r == 0 for r in exact_residual(Q, zero)))
        self.assertLess(max_residual(Q, zero, sample_points(3)), 1e-12)
        self.assertFalse(all(r == 0 for r in exact_residual(Q, identity(3))))

    def test_determining_equations(self):
        xs = state_symbols(2)
        zero = ImmutableMatrix.zeros(2, 2)
        Q = ProjectiveVectorField(0, [xs[0] ** 2, 0])
        self.assertEqual(determining_equations(Q, zero), ['quadratic velocity terms'])
        Q = ProjectiveVectorField(T * xs[0], [xs[0] * x for x in xs])
        self.assertEqual(determining_equations(Q, zero), [])

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            exact_residual(VectorField.time_translation(2), identity(3))
        with self.assertRaises(DimensionMismatchError):
            residual(VectorField.time_translation(2), identity(3), self.pts)

    def test_finite_difference(self):
        algebra = build_algebra(jordan((0, 2), (0, 1)))
        pts = sample_points(3, count=5)
        for generator in algebra.generators:
            for value in finite_difference_residual(generator, algebra.matrix, pts):
                self.assertLess(float(numpy.abs(value).max()), 1e-3)
        bad = VectorField.linear(unit_matrix(3, ((1, 0), 1)))
        self.assertGreater(max(float(numpy.abs(v).max())
                               for v in finite_difference_residual(bad, algebra.matrix, pts)), 0.1)


class TestClosure(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_blocks(self):
        algebra = build_algebra(EXAMPLE_BLOCKS)
        self.assertTrue(closure_check(algebra))
        self.assertEqual(bracket_span_ranks(algebra), (13, 13))

    def test_free(self):
        self.assertTrue(closure_check(build_free_algebra(2)))

    def test_injected_field(self):
        algebra = build_algebra(EXAMPLE_BLOCKS)
        algebra.generators.append(VectorField.linear(unit_matrix(4, ((1, 0), 1))))
        self.assertFalse(closure_check(algebra))
        self.assertTrue(all(j == 13 for _, j in closure_failures(algebra)))

    def test_span_oracle(self):
        algebra = build_algebra(EXAMPLE_BLOCKS)
        oracle = SpanOracle(algebra.generators)
        self.assertTrue(oracle.exact)
        self.assertEqual(oracle.rank(), 13)
        T_field, X = algebra.generators[-1], algebra.generators[0]
        self.assertTrue(oracle.contains(T_field.bracket(X)))
        self.assertTrue(oracle.contains(X.to_numeric()))
        self.assertFalse(in_span(algebra, VectorField.linear(unit_matrix(4, ((1, 0), 1)))))


class TestCommutantCounts(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_examples(self):
        self.assertEqual(tuple(cross_check_N(jordan_matrix(EXAMPLE_BLOCKS))), (4, 4, 4))
        self.assertEqual(tuple(cross_check_N(rat_matrix([[0, 2], [1, 0]]))), (2, 2, None))
        self.assertEqual(tuple(cross_check_N(identity(3))), (9, 9, 9))

    def assertCounts(self, D):
        n = D.rows
        counts = cross_check_N(D)
        self.assertEqual(counts.kernel, counts.partition, D)
        if counts.divisors is not None:
            self.assertEqual(counts.kernel, counts.divisors, D)
        self.assertEqual(counts.kernel % 2, n % 2)
        self.assertTrue(n <= counts.kernel <= n * n)

    def test_random_matrices(self):
        rng = numpy.random.default_rng(2024)
        for n in range(2, 6):
            for _ in range(25):
                self.assertCounts(rat_matrix(rng.integers(-3, 4, (n, n)).tolist()))

    def test_conjugated_jordan_forms(self):
        rng = numpy.random.default_rng(7)
        for n in range(2, 6):
            candidates = list(structures([n], (-1, 0, 2)))
            for _ in range(25):
                structure = candidates[rng.integers(len(candidates))]
                while True:
                    P = rat_matrix(rng.integers(-2, 3, (n, n)).tolist())
                    if P.det() != 0:
                        break
                J = jordan_matrix(structure)
                D = ImmutableMatrix(P * J * P.inv())
                counts = cross_check_N(D)
                self.assertIsNotNone(counts.divisors)
                self.assertCounts(D)
                self.assertEqual(counts.kernel, cross_check_N(J).kernel)


class TestSoundness(unittest.TestCase):
    """Every generator built for a corpus of Jordan structures is a symmetry."""

    def setUp(self):
        memoize_session_reset()

    def test_corpus(self):
        corpus = soundness_corpus()
        self.assertGreaterEqual(len(corpus), 50)
        for structure in corpus:
            self.assertTrue(fundamental_system(structure).is_nonsingular(), structure)
            algebra = build_algebra(structure)
            for generator in algebra.generators:
                self.assertTrue(all(r == 0 for r in exact_residual(generator, algebra.matrix)),
                                (structure, generator))
            self.assertTrue(closure_check(algebra), structure)

    def test_two_path_agreement(self):
        for structure in structures(range(2, 4), (-1, 0, 1)):
            algebra = build_algebra(structure)
            pts = sample_points(structure.n)
            for generator in algebra.generators:
                self.assertLess(residual_agreement(generator, algebra.matrix, pts), 1e-12)

    def test_exact_agreement(self):
        for structure in (EXAMPLE_BLOCKS, jordan((0, 2), (0, 1)), jordan((-1, 1), (4, 1))):
            algebra = build_algebra(structure)
            for generator in algebra.generators:
                self.assertTrue(exact_agreement(generator, algebra.matrix), generator)

    def test_free(self):
        for n in range(1, 5):
            algebra = build_free_algebra(n)
            for generator in algebra.generators:
                self.assertTrue(all(r == 0 for r in exact_residual(generator, algebra.matrix)), generator)
            if n <= 3:
                self.assertTrue(closure_check(algebra))


class TestRotationExample(unittest.TestCase):
    """The closed-form generators of the rotation example, with principal-root alpha and beta."""

    def setUp(self):
        memoize_session_reset()
        self.mu, self.nu = 1.0, 1.0
        root = cmath.sqrt(complex(self.mu, self.nu))
        self.alpha, self.beta = root.real, root.imag

    def cos(self, sign):
        # e^{sign alpha t} cos(beta t)
        a, b = sign * self.alpha, self.beta
        return ExpPoly([(0.5, 0, complex(a, b)), (0.5, 0, complex(a, -b))], numeric=True)

    def sin(self, sign):
        a, b = sign * self.alpha, self.beta
        return ExpPoly([(-0.5j, 0, complex(a, b)), (0.5j, 0, complex(a, -b))], numeric=True)

    def fields(self):
        mu, nu, alpha, beta = self.mu, self.nu, self.alpha, self.beta
        a, b = alpha ** 2 - beta ** 2 - mu, 2 * alpha * beta
        zero = ExpPoly.zero(True)

        def poly(*terms):
            return ExpPoly([(c, p, 0) for c, p in terms], numeric=True)

        def rotating(x1, x2):
            return VectorField.solution([x1, x2, zero, zero, zero], numeric=True)

        def nilpotent(x3, x4, x5):
            return VectorField.solution([zero, zero, x3, x4, x5], numeric=True)

        fields = [
            rotating(self.cos(1).scale(nu), self.cos(1).scale(a) - self.sin(1).scale(b)),
            rotating(self.sin(1).scale(nu), self.sin(1).scale(a) + self.cos(1).scale(b)),
            rotating(self.cos(-1).scale(nu), self.cos(-1).scale(a) + self.sin(-1).scale(b)),
            rotating(self.sin(-1).scale(nu), self.sin(-1).scale(a) - self.cos(-1).scale(b)),
            nilpotent(poly((1, 0)), zero, zero),
            nilpotent(poly((1, 1)), zero, zero),
            nilpotent(poly((1, 3)), poly((6, 1)), zero),
            nilpotent(poly((1, 2)), poly((2, 0)), zero),
            nilpotent(zero, zero, poly((1, 0))),
            nilpotent(zero, zero, poly((1, 1))),
        ]
        linear = [
            [((0, 0), 1), ((1, 1), 1)],
            [((0, 1), 1), ((1, 0), -1)],
            [((2, 2), 1), ((3, 3), 1)],
            [((2, 3), 1)],
            [((2, 4), 1)],
            [((4, 3), 1)],
            [((4, 4), 1)],
        ]
        fields += [VectorField.linear(unit_matrix(5, *entries), numeric=True) for entries in linear]
        fields.append(VectorField.time_translation(5, numeric=True))
        return fields

    def test_fields_are_symmetries(self):
        with self.assertLogs('linsym.algebra', level='WARNING'):
            algebra = build_algebra(EXAMPLE_ROTATION)
        pts = sample_points(5)
        fields = self.fields()
        self.assertEqual(len(fields), 18)
        for Q in fields:
            self.assertLess(max_residual(Q, algebra.matrix, pts), 1e-9)
            self.assertTrue(in_span(algebra, Q), Q)
        self.assertEqual(SpanOracle(fields).rank(), 18)
        self.assertEqual(SpanOracle(algebra.generators + fields).rank(), 18)

    def test_verify_numeric_algebra(self):
        with self.assertLogs('linsym.algebra', level='WARNING'):
            algebra = build_algebra(EXAMPLE_ROTATION)
        report = verify_algebra(algebra, D=jordan_matrix(EXAMPLE_ROTATION))
        self.assertFalse(report.exact)
        self.assertEqual(report.failures(), [])
        self.assertTrue(report.closure)
        self.assertEqual(tuple(report.counts), (7, 7, None))
        self.assertTrue(report.passed)


class TestVerifyAlgebra(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_passes(self):
        algebra = build_algebra(EXAMPLE_BLOCKS)
        report = verify_algebra(algebra, samples=10, seed=3, D=jordan_matrix(EXAMPLE_BLOCKS))
        self.assertTrue(report.exact)
        self.assertTrue(all(report.exact_zero))
        self.assertLess(max(report.residuals), 1e-9)
        self.assertLess(report.agreement, 1e-10)
        self.assertTrue(report.closure)
        self.assertTrue(report.counts_agree)
        self.assertTrue(report.passed)
        self.assertEqual((report.seed, report.samples), (3, 10))

    def test_finite_differences(self):
        algebra = build_algebra(jordan((0, 2), (0, 1)))
        self.assertIsNone(verify_algebra(algebra, samples=5).finite_differences)
        report = verify_algebra(algebra, samples=5, fd_step=1e-5)
        self.assertLess(report.finite_differences, 1e-3)
        self.assertTrue(report.passed)

    def test_wrong_system(self):
        algebra = build_algebra(EXAMPLE_BLOCKS)
        report = verify_algebra(algebra, J=jordan_matrix(jordan((2, 2), (2, 2))), closure=False)
        self.assertIsNone(report.closure)
        self.assertTrue(report.failures())
        self.assertFalse(report.passed)
        self.assertTrue(all(report.generator_passed(i) for i in range(4)))
