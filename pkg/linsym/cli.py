#!/usr/bin/python3

import cmdln
import logging

import ToolBase

from linsym.algebra import ExactnessError
from linsym.algebra_command import AlgebraCommand
from linsym.conf import MODES
from linsym.dim_command import DimCommand
from linsym.scan_command import ScanCommand
from linsym.serialize import AlgebraFileError
from linsym.serialize import EXACT
from linsym.serialize import NUMERIC
from linsym.serialize import SystemFileError
from linsym.serialize import load_algebra
from linsym.serialize import load_system
from linsym.structure import FIELDS
from linsym.structure import NonCommutingError
from linsym.verification import DimensionMismatchError
from linsym.verify_command import VerifyCommand

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NON_COMMUTING = 2
EXIT_EXACTNESS = 3
EXIT_VERIFICATION = 4

# First match wins, so subclasses of ValueError come before it.
EXIT_CODES = [
    (NonCommutingError, EXIT_NON_COMMUTING),
    (ExactnessError, EXIT_EXACTNESS),
    (DimensionMismatchError, EXIT_VERIFICATION),
    (SystemFileError, EXIT_PARSE),
    (AlgebraFileError, EXIT_PARSE),
    (ValueError, EXIT_PARSE),
]


def exit_code(error):
    for error_class, code in EXIT_CODES:
        if isinstance(error, error_class):
            return code
    return None


class CommandLineInterface(ToolBase.CommandLineInterface):
    name = 'linsym'

    def __init__(self, *args, **kwargs):
        ToolBase.CommandLineInterface.__init__(self, *args, **kwargs)

    def runner(self, workfunc):
        """Run a subcommand and turn domain errors into exit codes."""
        try:
            return workfunc()
        except ValueError as e:
            code = exit_code(e)
            if code is None:
                raise
            if self.options.debug:
                logger.exception(e)
            else:
                logger.error('%s', e)
            if code == EXIT_EXACTNESS:
                logger.error('rerun with --mode numeric')
            return code

    @staticmethod
    def _check_choice(value, choices, option):
        if value is not None and value not in choices:
            raise ValueError('{} must be one of {}'.format(option, ', '.join(choices)))

    @cmdln.option('-i', '--input', metavar='FILE', help='system file')
    @cmdln.option('--field', help='scalar field ({}), overrides the system file'.format(', '.join(FIELDS)))
    def do_dim(self, subcmd, opts):
        """${cmd_name}: dimension of the maximal Lie invariance algebra

        Prints n, the invariant factor degrees, N, the classification and
        the dimension without constructing any generator.

        ${cmd_usage}
        ${cmd_option_list}
        """

        def work():
            self._check_choice(opts.field, FIELDS, '--field')
            if not opts.input:
                raise ValueError('--input is required')
            DimCommand(self.tool.config()).perform(load_system(opts.input, opts.field))
            return EXIT_OK

        return self.runner(work)

    @cmdln.option('-i', '--input', metavar='FILE', help='system file')
    @cmdln.option('-o', '--output', metavar='FILE', help='write the algebra file here')
    @cmdln.option('--field', help='scalar field ({}), overrides the system file'.format(', '.join(FIELDS)))
    @cmdln.option('-m', '--mode', default=EXACT, help='arithmetic ({})'.format(', '.join(MODES)))
    def do_algebra(self, subcmd, opts):
        """${cmd_name}: generators of the maximal Lie invariance algebra

        Builds solution, commutant, time translation and (nilpotent case)
        dilation generators in the canonical coordinates of the system.
        Scalar systems yield the algebra of x'' = 0.

        ${cmd_usage}
        ${cmd_option_list}
        """

        def work():
            self._check_choice(opts.field, FIELDS, '--field')
            self._check_choice(opts.mode, MODES, '--mode')
            if not opts.input:
                raise ValueError('--input is required')
            system = load_system(opts.input, opts.field)
            AlgebraCommand(self.tool.config(opts.mode)).perform(system, opts.output, opts.mode)
            return EXIT_OK

        return self.runner(work)

    @cmdln.option('-i', '--input', metavar='FILE', help='system file')
    @cmdln.option('-a', '--algebra', metavar='FILE', help='algebra file to verify')
    @cmdln.option('--field', help='scalar field ({}), overrides the system file'.format(', '.join(FIELDS)))
    @cmdln.option('--samples', type='int', help='number of sample points')
    @cmdln.option('--seed', type='int', help='sample seed')
    @cmdln.option('--tol', type='float', help='numeric residual tolerance')
    @cmdln.option('--no-closure', action='store_true', help='skip the bracket closure check')
    def do_verify(self, subcmd, opts):
        """${cmd_name}: verify an algebra file against a system

        Substitutes every generator into the invariance condition at seeded
        sample points, checks bracket closure and cross-checks N.  Exits 4
        when anything fails.
        With --debug the central-difference residual is printed as well.

        ${cmd_usage}
        ${cmd_option_list}
        """

        def work():
            self._check_choice(opts.field, FIELDS, '--field')
            if not opts.input or not opts.algebra:
                raise ValueError('--input and --algebra are required')
            system = load_system(opts.input, opts.field)
            algebra = load_algebra(opts.algebra)
            config = self.tool.config(NUMERIC if algebra.numeric else EXACT,
                                      samples=opts.samples, seed=opts.seed, tolerance=opts.tol)
            report = VerifyCommand(config).perform(system, algebra, not opts.no_closure, self.options.debug)
            return EXIT_OK if report.passed else EXIT_VERIFICATION

        return self.runner(work)

    @cmdln.option('-n', '--n', type='int', dest='n', help='matrix size')
    def do_scan(self, subcmd, opts):
        """${cmd_name}: attainable algebra dimensions for n x n matrices

        Enumerates the invariant factor degree lists of non-scalar matrices
        and prints the dimensions they give, the bounds [3n + 1, n^2 + 4]
        and the values no matrix attains.

        ${cmd_usage}
        ${cmd_option_list}
        """

        def work():
            if opts.n is None:
                raise ValueError('--n is required')
            ScanCommand(self.tool.config()).perform(opts.n)
            return EXIT_OK

        return self.runner(work)
