"""YAML documents describing systems (input) and algebras (output).

Exact scalars are written as strings ("p/q" or "a + b*sqrt(d)"); numeric
scalars are mappings {re, im} so the two never get confused.
"""

import logging

import numpy
import yaml
from sympy import ImmutableMatrix

from linsym.algebra import FAMILIES
from linsym.algebra import PROJECTIVE
from linsym.algebra import T
from linsym.algebra import ProjectiveVectorField
from linsym.algebra import SymmetryAlgebra
from linsym.algebra import VectorField
from linsym.algebra import as_array
from linsym.algebra import state_symbols
from linsym.exact import QuadExtScalar
from linsym.exact import exact_scalar
from linsym.exact import parse_rational
from linsym.exact import rat_matrix
from linsym.exppoly import ExpPoly
from linsym.structure import FIELDS
from linsym.structure import COMPLEX
from linsym.structure import FREE
from linsym.structure import JordanStructure
from linsym.structure import NonCommutingError
from linsym.structure import SystemSpec
from linsym.structure import is_exact_value
from linsym.structure import jordan_matrix

logger = logging.getLogger(__name__)

EXACT = 'exact'
NUMERIC = 'numeric'


class SystemFileError(ValueError):
    pass


class AlgebraFileError(ValueError):
    pass


def dump_scalar(value, numeric):
    if numeric:
        value = complex(value)
        return {'re': value.real, 'im': value.imag}
    return str(exact_scalar(value))


def load_scalar(data, numeric):
    if numeric:
        if not isinstance(data, dict) or set(data) != {'re', 'im'}:
            raise ValueError('numeric scalar must be a mapping with re and im: {!r}'.format(data))
        return complex(float(data['re']), float(data['im']))
    if isinstance(data, int):
        return parse_rational(data)
    if not isinstance(data, str):
        raise ValueError('exact scalar must be a string: {!r}'.format(data))
    return exact_scalar(QuadExtScalar.parse(data))


def _matrix(data, n, name):
    if not isinstance(data, list) or len(data) != n or any(not isinstance(row, list) or len(row) != n for row in data):
        raise SystemFileError('{} must be a {}x{} matrix'.format(name, n, n))
    try:
        return rat_matrix([[str(e) if not isinstance(e, int) else e for e in row] for row in data])
    except ValueError as e:
        raise SystemFileError('{}: {}'.format(name, e))


def _jordan_blocks(data, field):
    if not isinstance(data, list) or not data:
        raise SystemFileError('jordan_blocks must be a non-empty list')
    blocks, rotations = [], []
    for entry in data:
        if not isinstance(entry, dict) or 'eig' not in entry or 'size' not in entry:
            raise SystemFileError('Jordan block needs eig and size: {!r}'.format(entry))
        size = entry['size']
        if not isinstance(size, int) or size < 1:
            raise SystemFileError('block size must be a positive integer: {!r}'.format(size))
        eig = entry['eig']
        try:
            if isinstance(eig, dict):
                rotations.append((parse_rational(str(eig['mu'])), parse_rational(str(eig['nu'])), size))
            else:
                blocks.append((parse_rational(eig if isinstance(eig, int) else str(eig)), size))
        except (KeyError, ValueError) as e:
            raise SystemFileError('bad eigenvalue {!r}: {}'.format(eig, e))
    try:
        return JordanStructure(blocks, rotations, field)
    except ValueError as e:
        raise SystemFileError(str(e))


def parse_system(document, field=None):
    """Build a SystemSpec from a loaded SystemFile document."""
    if not isinstance(document, dict):
        raise SystemFileError('system file must be a mapping')
    n = document.get('n')
    if not isinstance(n, int) or n < 2:
        raise SystemFileError('n must be an integer >= 2')
    field = field or document.get('field', COMPLEX)
    if field not in FIELDS:
        raise SystemFileError('field must be one of {}'.format(', '.join(FIELDS)))

    forms = [key for key in ('A', 'B', 'D', 'jordan_blocks') if key in document]
    if forms not in (['A', 'B'], ['D'], ['jordan_blocks']):
        raise SystemFileError('give exactly one of A and B, D or jordan_blocks')

    forcing = bool(document.get('forcing', False))
    try:
        if 'A' in document:
            return SystemSpec.from_coefficients(_matrix(document['A'], n, 'A'), _matrix(document['B'], n, 'B'),
                                                field, forcing)
        if 'D' in document:
            return SystemSpec.from_matrix(_matrix(document['D'], n, 'D'), field, forcing)
        structure = _jordan_blocks(document['jordan_blocks'], field)
        if structure.n != n:
            raise SystemFileError('jordan_blocks describe size {}, n is {}'.format(structure.n, n))
        return SystemSpec.from_jordan(structure, forcing)
    except NonCommutingError:
        raise
    except SystemFileError:
        raise
    except ValueError as e:
        raise SystemFileError(str(e))


def load_system(path, field=None):
    try:
        with open(path, encoding='utf-8') as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise SystemFileError('cannot read {}: {}'.format(path, e))
    return parse_system(document, field)


def _dump_matrix(M, numeric):
    rows = M.tolist()
    return [[dump_scalar(v, numeric) for v in row] for row in rows]


def _dump_structure(structure):
    if structure is None:
        return None

    # Rational values stay exact strings; block order puts exact eigenvalues first.
    def value(v):
        return dump_scalar(v, not is_exact_value(v))

    return {
        'field': structure.field,
        'blocks': [{'eig': value(b.eigenvalue), 'size': b.size} for b in structure.blocks],
        'rotations': [{'mu': value(r.mu), 'nu': value(r.nu), 'size': r.size} for r in structure.rotations],
    }


def _load_structure(data):
    if data is None:
        return None
    blocks = []
    for entry in data['blocks']:
        eig = entry['eig']
        blocks.append((load_scalar(eig, isinstance(eig, dict)), entry['size']))
    rotations = []
    for entry in data['rotations']:
        mu, nu = entry['mu'], entry['nu']
        rotations.append((_real(load_scalar(mu, isinstance(mu, dict))),
                          _real(load_scalar(nu, isinstance(nu, dict))), entry['size']))
    return JordanStructure(blocks, rotations, data['field'])


def _real(value):
    return value.real if isinstance(value, complex) else value


def _dump_generator(generator, numeric):
    if generator.family == PROJECTIVE:
        return {
            'family': PROJECTIVE,
            'xi': [{'coef': str(c), 'monomial': list(m)} for m, c in generator.xi.terms() if c != 0],
            'eta': [[{'coef': str(c), 'monomial': list(m)} for m, c in e.terms() if c != 0] for e in generator.eta],
        }
    return {
        'family': generator.family,
        'c1': dump_scalar(generator.c1, numeric),
        'c0': dump_scalar(generator.c0, numeric),
        'H': _dump_matrix(generator.H, numeric),
        'phi': [[{'coef': dump_scalar(c, numeric), 'power': p, 'freq': dump_scalar(f, numeric)}
                 for c, p, f in component.terms] for component in generator.drift],
    }


def _polynomial(terms, n):
    gens = (T,) + state_symbols(n)
    total = 0
    for term in terms:
        monomial = term['monomial']
        if len(monomial) != n + 1:
            raise AlgebraFileError('monomial {} does not match n = {}'.format(monomial, n))
        product = parse_rational(term['coef'])
        for gen, power in zip(gens, monomial):
            product *= gen ** power
        total += product
    return total


def _load_generator(data, n, numeric):
    family = data.get('family')
    if family not in FAMILIES:
        raise AlgebraFileError('unknown family {!r}'.format(family))
    if family == PROJECTIVE:
        if len(data['eta']) != n:
            raise AlgebraFileError('projective generator with {} components, expected {}'.format(len(data['eta']), n))
        return ProjectiveVectorField(_polynomial(data['xi'], n), [_polynomial(e, n) for e in data['eta']])

    H = [[load_scalar(v, numeric) for v in row] for row in data['H']]
    if len(H) != n or any(len(row) != n for row in H) or len(data['phi']) != n:
        raise AlgebraFileError('generator does not match n = {}'.format(n))
    drift = [ExpPoly([(load_scalar(term['coef'], numeric), int(term['power']), load_scalar(term['freq'], numeric))
                      for term in component], numeric) for component in data['phi']]
    return VectorField(load_scalar(data['c1'], numeric), load_scalar(data['c0'], numeric),
                       numpy.array(H, dtype=complex if numeric else object), drift, family, numeric)


def dump_algebra(algebra):
    """AlgebraFile document of an algebra."""
    numeric = algebra.numeric
    return {
        'dimension': algebra.dimension,
        'classification': algebra.classification,
        'N': algebra.N,
        'n': algebra.n,
        'field': algebra.field,
        'mode': NUMERIC if numeric else EXACT,
        'structure': _dump_structure(algebra.structure),
        'generators': [_dump_generator(g, numeric) for g in algebra.generators],
    }


def parse_algebra(document):
    if not isinstance(document, dict):
        raise AlgebraFileError('algebra file must be a mapping')
    try:
        n = int(document['n'])
        mode = document['mode']
        if mode not in (EXACT, NUMERIC):
            raise AlgebraFileError('mode must be exact or numeric')
        numeric = mode == NUMERIC
        generators = [_load_generator(g, n, numeric) for g in document['generators']]
        if len(generators) != document['dimension']:
            raise AlgebraFileError('{} generators listed, dimension is {}'.format(
                len(generators), document['dimension']))
        structure = _load_structure(document.get('structure'))
        classification = document['classification']
    except AlgebraFileError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise AlgebraFileError('malformed algebra file: {}'.format(e))

    if classification == FREE or structure is None:
        matrix = ImmutableMatrix.zeros(n, n)
    else:
        matrix = jordan_matrix(structure)
        if numeric:
            matrix = as_array(matrix, True)
    return SymmetryAlgebra(generators, classification, document['N'], document['field'], matrix, structure, numeric)


def load_algebra(path):
    try:
        with open(path, encoding='utf-8') as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise AlgebraFileError('cannot read {}: {}'.format(path, e))
    return parse_algebra(document)


def write_algebra(algebra, path):
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(dump_algebra(algebra), f, default_flow_style=None, sort_keys=False)
