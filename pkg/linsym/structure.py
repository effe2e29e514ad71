from collections import namedtuple
import logging

import numpy
from sympy import ImmutableMatrix
from sympy import Rational
from sympy import sqrt

from linsym.exact import LAMBDA
from linsym.exact import charpoly
from linsym.exact import factor_rational_roots
from linsym.exact import identity
from linsym.exact import poly
from linsym.exact import rank
from linsym.memoize import memoize

logger = logging.getLogger(__name__)

COMPLEX = 'complex'
REAL = 'real'
FIELDS = (COMPLEX, REAL)

FREE = 'free'
NILPOTENT = 'nilpotent'
NON_NILPOTENT = 'non_nilpotent'

InvariantFactorData = namedtuple('InvariantFactorData', ['factors', 'degrees'])
JordanBlock = namedtuple('JordanBlock', ['eigenvalue', 'size'])
RotationBlock = namedtuple('RotationBlock', ['mu', 'nu', 'size'])


class NonCommutingError(ValueError):
    pass


def is_exact_value(value):
    return isinstance(value, (int, Rational))


def _eigenvalue_key(value):
    if is_exact_value(value):
        return (0, Rational(value), 0.0)
    value = complex(value)
    return (1, value.real, value.imag)


def same_eigenvalue(a, b, tolerance=1e-9):
    if is_exact_value(a) and is_exact_value(b):
        return a == b
    a, b = complex(a), complex(b)
    return abs(a - b) <= tolerance * max(1.0, abs(a), abs(b))


class JordanStructure(object):
    """Multiset of Jordan blocks, plus real rotation blocks over the reals.

    Rational eigenvalues are sympy Rationals, all others Python complex
    numbers.  Rotation blocks come first in the canonical matrix.
    """

    def __init__(self, blocks=(), rotations=(), field=COMPLEX):
        if field not in FIELDS:
            raise ValueError('unknown field {}'.format(field))
        blocks = [JordanBlock(Rational(e) if is_exact_value(e) else complex(e), int(k)) for e, k in blocks]
        rotations = [RotationBlock(_rotation_value(mu), _rotation_value(nu), int(k)) for mu, nu, k in rotations]
        if any(b.size < 1 for b in blocks) or any(r.size < 1 for r in rotations):
            raise ValueError('block sizes must be positive')
        if rotations and field != REAL:
            raise ValueError('rotation blocks need the real field')
        if any(r.nu == 0 for r in rotations):
            raise ValueError('rotation blocks need nu != 0')
        if field == REAL and any(not is_exact_value(b.eigenvalue) and b.eigenvalue.imag != 0 for b in blocks):
            raise ValueError('complex eigenvalue in a real Jordan block')

        self.blocks = tuple(sorted(blocks, key=lambda b: (_eigenvalue_key(b.eigenvalue), -b.size)))
        self.rotations = tuple(sorted(rotations, key=lambda r: (_eigenvalue_key(r.mu), _eigenvalue_key(r.nu), -r.size)))
        self.field = field

    @property
    def n(self):
        return sum(b.size for b in self.blocks) + 2 * sum(r.size for r in self.rotations)

    @property
    def exact(self):
        """True when every eigenvalue (and rotation parameter) is rational."""
        return (all(is_exact_value(b.eigenvalue) for b in self.blocks) and
                all(is_exact_value(r.mu) and is_exact_value(r.nu) for r in self.rotations))

    def eigenvalue_groups(self):
        """Block sizes per distinct eigenvalue, complex eigenvalues included."""
        groups = []
        for eigenvalue, size in self.elementary_divisors():
            for group in groups:
                if same_eigenvalue(group[0], eigenvalue):
                    group[1].append(size)
                    break
            else:
                groups.append((eigenvalue, [size]))
        return [(e, sorted(sizes, reverse=True)) for e, sizes in groups]

    def elementary_divisors(self):
        divisors = [(b.eigenvalue, b.size) for b in self.blocks]
        for r in self.rotations:
            z = complex(float(r.mu), float(r.nu))
            divisors.append((z, r.size))
            divisors.append((z.conjugate(), r.size))
        return divisors

    def partition(self):
        """Invariant factor degrees, largest first."""
        degrees = []
        for _, sizes in self.eigenvalue_groups():
            for index, size in enumerate(sizes):
                if index == len(degrees):
                    degrees.append(0)
                degrees[index] += size
        return tuple(degrees)

    def is_nilpotent(self):
        return not self.rotations and all(b.eigenvalue == 0 for b in self.blocks)

    def is_scalar(self):
        return (not self.rotations and all(b.size == 1 for b in self.blocks) and
                len(self.eigenvalue_groups()) == 1)

    def __eq__(self, other):
        if not isinstance(other, JordanStructure):
            return NotImplemented
        shape = (self.field, len(self.blocks), len(self.rotations))
        if shape != (other.field, len(other.blocks), len(other.rotations)):
            return False
        for a, b in zip(self.blocks, other.blocks):
            if a.size != b.size or not same_eigenvalue(a.eigenvalue, b.eigenvalue):
                return False
        for a, b in zip(self.rotations, other.rotations):
            if a.size != b.size or not (same_eigenvalue(a.mu, b.mu) and same_eigenvalue(a.nu, b.nu)):
                return False
        return True

    def __hash__(self):
        return hash((self.field, self.n, len(self.blocks), len(self.rotations)))

    def __str__(self):
        parts = ['R({}, {})^{}'.format(r.mu, r.nu, r.size) for r in self.rotations]
        parts += ['J({})^{}'.format(b.eigenvalue, b.size) for b in self.blocks]
        return '{} [{}]'.format(' + '.join(parts), self.field)

    def __repr__(self):
        return 'JordanStructure({})'.format(self)


def _rotation_value(value):
    if is_exact_value(value):
        return Rational(value)
    return float(value)


def reduce_system(A, B):
    """Return D = B - A^2 for commuting square matrices A and B."""
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError('A and B must be square matrices of equal size')
    if A * B != B * A:
        raise NonCommutingError('matrices must commute')
    return ImmutableMatrix(B - A * A)


def is_nilpotent(D):
    return (D ** D.rows).is_zero_matrix


def is_scalar(D):
    return D == D[0, 0] * identity(D.rows)


def classify(D):
    if is_scalar(D):
        return FREE
    if is_nilpotent(D):
        return NILPOTENT
    return NON_NILPOTENT


def _characteristic_matrix(D):
    n = D.rows
    return [[poly((LAMBDA if i == j else 0) - D[i, j]) for j in range(n)] for i in range(n)]


def _smith_diagonal(M):
    n = len(M)
    diagonal = []
    for k in range(n):
        while True:
            entries = [(M[i][j].degree(), i, j) for i in range(k, n) for j in range(k, n) if not M[i][j].is_zero]
            if not entries:
                return diagonal
            _, pi, pj = min(entries)
            M[k], M[pi] = M[pi], M[k]
            for row in M:
                row[k], row[pj] = row[pj], row[k]

            pivot = M[k][k]
            clean = True
            for i in range(k + 1, n):
                q, r = M[i][k].div(pivot)
                if not q.is_zero:
                    M[i] = [M[i][j] - q * M[k][j] for j in range(n)]
                clean = clean and r.is_zero
            for j in range(k + 1, n):
                q, r = M[k][j].div(pivot)
                if not q.is_zero:
                    for row in M:
                        row[j] = row[j] - q * row[k]
                clean = clean and r.is_zero
            if not clean:
                continue

            offender = next((i for i in range(k + 1, n) for j in range(k + 1, n)
                             if not M[i][j].rem(pivot).is_zero), None)
            if offender is None:
                break
            M[k] = [M[k][j] + M[offender][j] for j in range(n)]

        diagonal.append(M[k][k].monic())

    return diagonal


@memoize()
def smith_invariant_factors(D):
    """Nonconstant invariant polynomials of lambda E - D, largest degree first."""
    diagonal = _smith_diagonal(_characteristic_matrix(D))
    factors = sorted((p for p in diagonal if p.degree() > 0), key=lambda p: -p.degree())
    data = InvariantFactorData(tuple(factors), tuple(p.degree() for p in factors))
    logger.debug('invariant factor degrees %s', data.degrees)
    return data


def commutant_count_from_partition(degrees):
    """N = n1 + 3 n2 + ... + (2q - 1) nq."""
    degrees = list(degrees)
    if any(d <= 0 for d in degrees) or degrees != sorted(degrees, reverse=True):
        raise ValueError('not a partition: {}'.format(degrees))
    return sum((2 * i + 1) * d for i, d in enumerate(degrees))


def commutant_count_from_divisors(divisors, tolerance=1e-9):
    """N as the sum of min(k_i, k_j) over pairs of divisors with equal eigenvalue."""
    total = 0
    for a, ka in divisors:
        for b, kb in divisors:
            if same_eigenvalue(a, b, tolerance):
                total += min(ka, kb)
    return total


def single_eigenvalue_count(sizes):
    """Both closed forms of N for one eigenvalue with block sizes ``sizes``."""
    sizes = sorted(sizes, reverse=True)
    n, s = sum(sizes), len(sizes)
    ramp = sum((2 * i + 1) * k for i, k in enumerate(sizes))
    differences = n * s - sum(sizes[i] - sizes[j] for i in range(s) for j in range(i + 1, s))
    return ramp, differences


def elementary_divisors(data):
    """Elementary divisors read off the invariant factors, or None if irrational."""
    divisors = []
    for factor in data.factors:
        roots, residual = factor_rational_roots(factor)
        if residual.degree() > 0:
            return None
        divisors.extend(roots)
    return sorted(divisors, key=lambda d: (d[0], -d[1]))


def _rank_sequence_sizes(D, eigenvalue):
    n = D.rows
    shifted = D - eigenvalue * identity(n)
    ranks = [n]
    power = identity(n)
    while True:
        power = power * shifted
        ranks.append(rank(power))
        if ranks[-1] == ranks[-2]:
            break
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k, count in enumerate(at_least, start=1):
        exactly = count - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * exactly)
    return sizes


def _split_by_multiplicity(piece, factor):
    """Split a square-free ``piece`` by the multiplicity its roots have in ``factor``."""
    parts = []
    previous = poly(1)
    remaining = piece
    power = 0
    while remaining.degree() > 0:
        power += 1
        common = factor.gcd(piece ** power).monic()
        at_least = common.exquo(previous)
        previous = common
        exactly = remaining.exquo(at_least)
        if exactly.degree() > 0:
            parts.append((exactly.monic(), power - 1))
        remaining = at_least
    return parts


def _numeric_pieces(data):
    """Pieces of the irrational part whose roots share one block-size pattern."""
    residuals = [factor_rational_roots(f)[1] for f in data.factors]
    if not residuals or residuals[0].degree() == 0:
        return []

    pieces = [(p.monic(), ()) for p, _ in residuals[0].sqf_list()[1]]
    for residual in residuals:
        refined = []
        for piece, pattern in pieces:
            for part, multiplicity in _split_by_multiplicity(piece, residual):
                refined.append((part, pattern + (multiplicity,)))
        pieces = refined

    return [(piece, [m for m in pattern if m > 0]) for piece, pattern in pieces]


def _numeric_roots(piece):
    coefficients = [complex(c) for c in piece.all_coeffs()]
    return list(numpy.roots(coefficients))


def _exact_rotation(piece):
    """(mu, nu) with rational mu and nu > 0 when ``piece`` is (lambda - mu)^2 + nu^2, else None."""
    if piece.degree() != 2:
        return None
    _, b, c = [Rational(coefficient) for coefficient in piece.monic().all_coeffs()]
    mu = -b / 2
    nu_squared = c - mu ** 2
    if nu_squared <= 0:
        return None
    nu = sqrt(nu_squared)
    if not nu.is_Rational:
        return None
    return mu, Rational(nu)


def _merge_conjugates(roots, sizes, tolerance):
    blocks, rotations = [], []
    upper = [z for z in roots if z.imag > tolerance * max(1.0, abs(z))]
    lower = [z for z in roots if z.imag < -tolerance * max(1.0, abs(z))]
    real = [z for z in roots if z not in upper and z not in lower]
    if len(upper) != len(lower):
        raise ArithmeticError('inconsistent conjugate structure')

    for z in upper:
        match = min(lower, key=lambda w: abs(w - z.conjugate()))
        if abs(match - z.conjugate()) > tolerance * max(1.0, abs(z)) * 1e3:
            raise ArithmeticError('inconsistent conjugate structure')
        lower.remove(match)
        rotations.extend(RotationBlock(z.real, z.imag, k) for k in sizes)

    for z in real:
        blocks.extend(JordanBlock(complex(z.real, 0.0), k) for k in sizes)
    return blocks, rotations


def jordan_structure(D, field=COMPLEX, tolerance=1e-9):
    """Jordan structure of a rational matrix.

    Rational eigenvalues come from exact rank sequences.  The remaining
    eigenvalues are located numerically, one square-free piece of the
    invariant factors at a time, so their block sizes stay exact.
    """
    cp = charpoly(D)
    roots, residual = factor_rational_roots(cp)

    blocks = []
    for eigenvalue, _ in roots:
        blocks.extend(JordanBlock(eigenvalue, k) for k in _rank_sequence_sizes(D, eigenvalue))

    rotations = []
    if residual.degree() > 0:
        for piece, sizes in _numeric_pieces(smith_invariant_factors(D)):
            if field == REAL:
                for factor, _ in piece.factor_list()[1]:
                    exact_rotation = _exact_rotation(factor)
                    if exact_rotation is not None:
                        rotations.extend(RotationBlock(exact_rotation[0], exact_rotation[1], k) for k in sizes)
                        piece = piece.exquo(factor)
                if piece.degree() == 0:
                    continue
            logger.warning('irrational eigenvalues, falling back to numeric roots of %s', piece.as_expr())
            piece_roots = _numeric_roots(piece)
            if field == REAL:
                extra_blocks, extra_rotations = _merge_conjugates(piece_roots, sizes, tolerance)
                blocks.extend(extra_blocks)
                rotations.extend(extra_rotations)
            else:
                for z in piece_roots:
                    blocks.extend(JordanBlock(complex(z), k) for k in sizes)

    structure = JordanStructure(blocks, rotations, field)
    if structure.n != D.rows:
        raise ArithmeticError('Jordan structure of size {} for a {}x{} matrix'.format(structure.n, D.rows, D.cols))
    logger.debug('Jordan structure %s', structure)
    return structure


def _rotation_matrix(mu, nu, size, entry):
    block = [[entry(0)] * (2 * size) for _ in range(2 * size)]
    for j in range(size):
        a, b = 2 * j, 2 * j + 1
        block[a][a] = block[b][b] = entry(mu)
        block[a][b] = entry(nu)
        block[b][a] = entry(-nu)
        if j + 1 < size:
            block[a][a + 2] = block[b][b + 2] = entry(1)
    return block


def _jordan_rows(eigenvalue, size, entry):
    block = [[entry(0)] * size for _ in range(size)]
    for j in range(size):
        block[j][j] = entry(eigenvalue)
        if j + 1 < size:
            block[j][j + 1] = entry(1)
    return block


def _assemble(structure, blocks_of):
    blocks = [_rotation_matrix(r.mu, r.nu, r.size, blocks_of) for r in structure.rotations]
    blocks += [_jordan_rows(b.eigenvalue, b.size, blocks_of) for b in structure.blocks]
    n = structure.n
    rows = [[blocks_of(0)] * n for _ in range(n)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, value in enumerate(row):
                rows[offset + i][offset + j] = value
        offset += len(block)
    return rows


def jordan_matrix(structure):
    """Canonical matrix of a structure.

    Exact structures give an ImmutableMatrix, all others a numpy array
    (complex, or float over the reals).
    """
    if structure.exact:
        return ImmutableMatrix(_assemble(structure, Rational))
    if structure.field == REAL:
        return numpy.array(_assemble(structure, lambda v: complex(v).real), dtype=float)
    return numpy.array(_assemble(structure, complex), dtype=complex)


def surrogate_matrix(structure):
    """A rational matrix with the block layout and eigenvalue coincidences of ``structure``.

    Its commutant equals the commutant of the true canonical matrix.
    """
    if structure.exact:
        return jordan_matrix(structure)

    exact_values = [b.eigenvalue for b in structure.blocks if is_exact_value(b.eigenvalue)]
    exact_values += [r.mu for r in structure.rotations if is_exact_value(r.mu)]
    start = int(max(exact_values, default=0)) + 1
    replacements = []

    def replace(value):
        if is_exact_value(value):
            return Rational(value)
        for original, substitute in replacements:
            if same_eigenvalue(original, value):
                return substitute
        substitute = Rational(start + len(replacements))
        replacements.append((value, substitute))
        return substitute

    blocks = [(replace(b.eigenvalue), b.size) for b in structure.blocks]
    rotations = []
    for r in structure.rotations:
        if is_exact_value(r.mu) and is_exact_value(r.nu):
            rotations.append((r.mu, r.nu, r.size))
        else:
            rotations.append((replace(complex(r.mu, r.nu)), 1, r.size))

    return jordan_matrix(JordanStructure(blocks, rotations, structure.field))


class SystemSpec(object):
    """A system x'' = A x' + B x + C(t), given by (A, B), by D or by its Jordan structure."""

    def __init__(self, n, A=None, B=None, D=None, jordan=None, field=COMPLEX, has_forcing=False):
        if n < 2:
            raise ValueError('n must be at least 2')
        if field not in FIELDS:
            raise ValueError('unknown field {}'.format(field))
        given = [x is not None for x in ((A if A is not None else B), D, jordan)]
        if sum(given) != 1:
            raise ValueError('give exactly one of (A, B), D or a Jordan structure')

        self.n = n
        self.A = A
        self.B = B
        self.D = D
        self.jordan = jordan
        self.field = field
        self.has_forcing = has_forcing

        for matrix in (A, B, D):
            if matrix is not None and matrix.shape != (n, n):
                raise ValueError('expected a {0}x{0} matrix, got {1}x{2}'.format(n, *matrix.shape))
        if (A is None) != (B is None):
            raise ValueError('A and B must be given together')
        if jordan is not None and jordan.n != n:
            raise ValueError('Jordan structure has size {}, expected {}'.format(jordan.n, n))
        if A is not None:
            reduce_system(A, B)

    @classmethod
    def from_coefficients(cls, A, B, field=COMPLEX, has_forcing=False):
        return cls(A.rows, A=A, B=B, field=field, has_forcing=has_forcing)

    @classmethod
    def from_matrix(cls, D, field=COMPLEX, has_forcing=False):
        return cls(D.rows, D=D, field=field, has_forcing=has_forcing)

    @classmethod
    def from_jordan(cls, structure, has_forcing=False):
        return cls(structure.n, jordan=structure, field=structure.field, has_forcing=has_forcing)

    def reduced(self):
        """The rational matrix D of the reduced system y'' = D y."""
        if self.A is not None:
            return reduce_system(self.A, self.B)
        if self.D is not None:
            return self.D
        if not self.jordan.exact:
            raise ValueError('structure has no rational matrix')
        return jordan_matrix(self.jordan)

    def structure(self, tolerance=1e-9):
        if self.jordan is not None:
            return self.jordan
        return jordan_structure(self.reduced(), self.field, tolerance)
