import itertools
import unittest

from sympy import ImmutableMatrix
from sympy import Rational

from linsym.algebra import COMMUTANT
from linsym.algebra import DILATION
from linsym.algebra import MAXIMAL
from linsym.algebra import MINIMAL
from linsym.algebra import SINGLE_NILPOTENT_BLOCK
from linsym.algebra import SOLUTION
from linsym.algebra import SUBMAXIMAL
from linsym.algebra import TIME_TRANSLATION
from linsym.algebra import ExactnessError
from linsym.algebra import ScalarSystemError
from linsym.algebra import VectorField
from linsym.algebra import build_algebra
from linsym.algebra import build_free_algebra
from linsym.algebra import dimension_bounds
from linsym.algebra import dimension_only
from linsym.algebra import extremal_family
from linsym.algebra import free_dimension
from linsym.algebra import lift_by_similarity
from linsym.algebra import missing_intervals
from linsym.algebra import next_submaximal_count
from linsym.algebra import realizable_dimensions
from linsym.algebra import structure_dimension
from linsym.exact import identity
from linsym.exact import rat_matrix
from linsym.exppoly import ExpPoly
from linsym.memoize import memoize_session_reset
from linsym.structure import FREE
from linsym.structure import NILPOTENT
from linsym.structure import NON_NILPOTENT
from linsym.structure import REAL
from linsym.structure import JordanStructure
from linsym.structure import jordan_matrix
from linsym.structure import jordan_structure
from linsym.verification import exact_residual

from .corpus import partitions


def jordan(*blocks, field='complex'):
    return JordanStructure(blocks, (), field)


class TestDimension(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_two_blocks(self):
        cases = [((2, 3), 13, 4), ((2, 0), 13, 4), ((2, 2), 17, 8), ((0, 0), 18, 8)]
        for (a, b), dimension, N in cases:
            structure = jordan((a, 2), (b, 2))
            algebra = build_algebra(structure)
            self.assertEqual(algebra.dimension, dimension)
            self.assertEqual(algebra.N, N)
            report = dimension_only(jordan_matrix(structure))
            self.assertEqual((report.dimension, report.N), (dimension, N))

    def test_classification(self):
        self.assertEqual(dimension_only(jordan_matrix(jordan((0, 2), (0, 2)))).classification, NILPOTENT)
        self.assertEqual(dimension_only(jordan_matrix(jordan((2, 2), (3, 2)))).classification, NON_NILPOTENT)
        report = dimension_only(5 * identity(3))
        self.assertEqual((report.dimension, report.classification), (24, FREE))

    def test_minimal(self):
        algebra = build_algebra(jordan((1, 1), (4, 1)))
        self.assertEqual(algebra.dimension, 7)

    def test_bounds(self):
        for n in range(2, 7):
            low, high = dimension_bounds(n)
            self.assertEqual(structure_dimension(jordan((0, 2), *[(0, 1)] * (n - 2))).dimension, n * n + 4)
            self.assertEqual(structure_dimension(jordan((0, n))).dimension, 3 * n + 2)
            self.assertEqual(structure_dimension(jordan(*[(k, 1) for k in range(n)])).dimension, 3 * n + 1)
            self.assertEqual(dimension_only(Rational(7, 2) * identity(n)).dimension, n * n + 4 * n + 3)
            self.assertEqual((low, high), (3 * n + 1, n * n + 4))

    def test_bounds_built(self):
        for n in range(2, 5):
            self.assertEqual(build_algebra(jordan((0, 2), *[(0, 1)] * (n - 2))).dimension, n * n + 4)
            self.assertEqual(build_algebra(jordan((0, n))).dimension, 3 * n + 2)
            self.assertEqual(build_algebra(jordan(*[(k, 1) for k in range(n)])).dimension, 3 * n + 1)

    def test_exhaustive_maximum(self):
        for n in range(2, 5):
            best = 0
            for sizes in partitions(n):
                for values in itertools.product((0, 1, -1), repeat=len(sizes)):
                    structure = jordan(*zip(values, sizes))
                    if structure.is_scalar():
                        continue
                    dimension = structure_dimension(structure).dimension
                    self.assertGreaterEqual(dimension, 3 * n + 1)
                    best = max(best, dimension)
            self.assertEqual(best, n * n + 4)

    def test_free(self):
        for n in range(1, 5):
            algebra = build_free_algebra(n)
            self.assertEqual(algebra.dimension, (n + 2) ** 2 - 1)
            self.assertEqual(algebra.dimension, free_dimension(n))
            self.assertEqual(algebra.classification, FREE)

    def test_scalar_rejected(self):
        with self.assertRaises(ScalarSystemError):
            build_algebra(jordan((3, 1), (3, 1)))

    def test_exactness(self):
        structure = jordan_structure(rat_matrix([[0, 2], [1, 0]]))
        with self.assertRaises(ExactnessError):
            build_algebra(structure)
        algebra = build_algebra(structure, 'numeric')
        self.assertTrue(algebra.numeric)
        self.assertEqual(algebra.dimension, 7)

    def test_rotation_in_exact_mode(self):
        # rational and irrational frequencies both fall back to numeric generators
        for D in ([[1, 1, 0], [-1, 1, 0], [0, 0, 0]], [[1, -2, 0], [1, 1, 0], [0, 0, 0]]):
            structure = jordan_structure(rat_matrix(D), REAL)
            self.assertEqual(len(structure.rotations), 1)
            with self.assertLogs('linsym.algebra', level='WARNING'):
                algebra = build_algebra(structure)
            self.assertTrue(algebra.numeric)
            self.assertEqual(algebra.dimension, build_algebra(structure, 'numeric').dimension)
            self.assertEqual(algebra.dimension, structure_dimension(structure).dimension)


class TestGenerators(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_order(self):
        algebra = build_algebra(jordan((0, 2), (0, 2)))
        families = [g.family for g in algebra.generators]
        self.assertEqual(families, [SOLUTION] * 8 + [COMMUTANT] * 8 + [TIME_TRANSLATION, DILATION])
        self.assertEqual(algebra.families(), {SOLUTION: 8, COMMUTANT: 8, TIME_TRANSLATION: 1, DILATION: 1})

    def test_dilation(self):
        dilation = build_algebra(jordan((0, 2), (0, 2))).generators[-1]
        self.assertEqual(dilation.c1, 1)
        self.assertEqual([dilation.H[i, i] for i in range(4)], [-2, -4, -2, -4])
        self.assertTrue(all(dilation.H[i, j] == 0 for i in range(4) for j in range(4) if i != j))
        self.assertTrue(all(phi.is_zero() for phi in dilation.drift))

    def test_exact_residuals(self):
        for structure in (jordan((2, 2), (3, 2)), jordan((0, 2), (0, 1)), jordan((-1, 1), (1, 2))):
            algebra = build_algebra(structure)
            for generator in algebra.generators:
                self.assertTrue(all(r == 0 for r in exact_residual(generator, algebra.matrix)), generator)

    def test_real_field(self):
        algebra = build_algebra(jordan((-1, 2), (2, 1), field=REAL))
        self.assertFalse(algebra.numeric)
        for generator in algebra.generators:
            self.assertTrue(all(r == 0 for r in exact_residual(generator, algebra.matrix)))

    def test_rotation_is_numeric(self):
        structure = JordanStructure([(0, 2), (0, 1)], [(1, 1, 1)], REAL)
        with self.assertLogs('linsym.algebra', level='WARNING'):
            algebra = build_algebra(structure)
        self.assertTrue(algebra.numeric)
        self.assertEqual((algebra.dimension, algebra.N), (18, 7))

    def test_frequency_tolerance(self):
        algebra = build_algebra(jordan((2, 2), (3, 1)), 'numeric', frequency_tolerance=1e-6)
        solutions = [g for g in algebra.generators if g.family == SOLUTION]
        self.assertEqual(len(solutions), 6)
        self.assertTrue(all(phi.tolerance == 1e-6 for g in solutions for phi in g.drift))


class TestBracket(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_dilation_time_translation(self):
        algebra = build_algebra(jordan((0, 2), (0, 1)))
        T, D = algebra.generators[-2], algebra.generators[-1]
        self.assertEqual(D.bracket(T).coordinates(), {('c0',): -1})
        self.assertEqual(T.bracket(D).coordinates(), {('c0',): 1})

    def test_time_translation_solution(self):
        algebra = build_algebra(jordan((2, 2), (3, 2)))
        T = next(g for g in algebra.generators if g.family == TIME_TRANSLATION)
        for X in (g for g in algebra.generators if g.family == SOLUTION):
            bracket = T.bracket(X)
            for component, phi in zip(bracket.drift, X.drift):
                self.assertEqual(component, phi.differentiate())
            self.assertEqual(bracket.c0, 0)

    def test_linear(self):
        H1 = rat_matrix([[0, 1], [0, 0]])
        H2 = rat_matrix([[1, 0], [0, 2]])
        bracket = VectorField.linear(H1).bracket(VectorField.linear(H2))
        expected = H2 * H1 - H1 * H2
        self.assertEqual(ImmutableMatrix(bracket.H.tolist()), expected)
        self.assertTrue(all(phi.is_zero() for phi in bracket.drift))

    def test_antisymmetry(self):
        phi = [ExpPoly.monomial(1, 1, 2), ExpPoly.zero()]
        X = VectorField.solution(phi)
        Y = VectorField.linear(rat_matrix([[1, 1], [0, 1]]), c1=1)
        self.assertEqual(X.bracket(Y).coordinates(), {k: -v for k, v in Y.bracket(X).coordinates().items()})


class TestSpectrum(unittest.TestCase):
    def test_scan(self):
        for n in range(2, 5):
            low, high = dimension_bounds(n)
            self.assertEqual(realizable_dimensions(n), set(range(low, high + 1)))
            self.assertEqual(missing_intervals(n), [])
        self.assertEqual(set(range(16, 30)) - realizable_dimensions(5), {26, 27})
        self.assertEqual(missing_intervals(5), [(26, 27)])

    def test_gap_formula(self):
        for n in range(5, 9):
            gaps = missing_intervals(n)
            self.assertIn((n * n - 2 * n + 11, n * n + 2), gaps)

    def test_scan_range(self):
        with self.assertRaises(ValueError):
            realizable_dimensions(1)
        with self.assertRaises(ValueError):
            realizable_dimensions(9)

    def test_next_submaximal(self):
        for n in range(4, 9):
            self.assertEqual(next_submaximal_count(n), n * n - 4 * n + 8)
        with self.assertRaises(ValueError):
            next_submaximal_count(3)

    def test_extremal_family(self):
        self.assertEqual(extremal_family(jordan((0, 2), (0, 1), (0, 1))), MAXIMAL)
        self.assertEqual(extremal_family(jordan((3, 2), (3, 1))), SUBMAXIMAL)
        self.assertEqual(extremal_family(jordan((3, 1), (3, 1), (5, 1))), SUBMAXIMAL)
        self.assertEqual(extremal_family(jordan((0, 4))), SINGLE_NILPOTENT_BLOCK)
        self.assertEqual(extremal_family(jordan((1, 2), (2, 1))), MINIMAL)
        self.assertIsNone(extremal_family(jordan((1, 2), (1, 2))))

        self.assertEqual(structure_dimension(jordan((3, 2), (3, 1))).dimension, 3 * 3 + 3)
        self.assertEqual(structure_dimension(jordan((3, 1), (3, 1), (5, 1))).dimension, 3 * 3 + 3)


class TestLift(unittest.TestCase):
    def setUp(self):
        memoize_session_reset()

    def test_lift(self):
        structure = jordan((2, 2), (0, 1))
        algebra = build_algebra(structure)
        P = rat_matrix([[1, 1, 0], [0, 1, 2], [1, 0, 1]])
        lifted = lift_by_similarity(algebra, P)
        self.assertEqual(lifted.matrix, P * jordan_matrix(structure) * P.inv())
        self.assertEqual(lifted.dimension, algebra.dimension)
        for generator in lifted.generators:
            self.assertTrue(all(r == 0 for r in exact_residual(generator, lifted.matrix)))

    def test_lift_singular(self):
        algebra = build_algebra(jordan((2, 2)))
        with self.assertRaises(ValueError):
            lift_by_similarity(algebra, rat_matrix([[1, 1], [1, 1]]))
        with self.assertRaises(ValueError):
            lift_by_similarity(build_free_algebra(2), identity(2))
