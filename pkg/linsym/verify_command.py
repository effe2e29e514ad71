import logging

from colorama import Fore

from linsym.dim_command import system_dimension
from linsym.verification import DimensionMismatchError
from linsym.verification import verify_algebra

logger = logging.getLogger(__name__)


def check_compatible(system, algebra, tolerance=1e-9):
    """Raise DimensionMismatchError unless the algebra was built for this system."""
    if algebra.n != system.n:
        raise DimensionMismatchError('algebra acts on {} variables, system has {}'.format(algebra.n, system.n))
    report = system_dimension(system)
    if (algebra.dimension, algebra.classification) != (report.dimension, report.classification):
        raise DimensionMismatchError('algebra has dimension {} ({}), system needs {} ({})'.format(
            algebra.dimension, algebra.classification, report.dimension, report.classification))
    if algebra.structure is not None and algebra.structure != system.structure(tolerance):
        raise DimensionMismatchError('algebra was built for {}, system has {}'.format(
            algebra.structure, system.structure(tolerance)))


class VerifyCommand(object):
    def __init__(self, config):
        self.config = config

    def perform(self, system, algebra, closure=True, finite_differences=False):
        """
        Verify every generator of the algebra against the system and print the residual table

        finite_differences adds the central-difference residual as a third opinion.
        """
        check_compatible(system, algebra, self.config.getfloat('cluster-tolerance'))

        tolerance = self.config.getfloat('tolerance')
        report = verify_algebra(algebra,
                                samples=self.config.getint('samples'),
                                seed=self.config.getint('seed'),
                                tolerance=tolerance,
                                span_tolerance=self.config.getfloat('span-tolerance'),
                                closure=closure,
                                D=system.reduced(),
                                fd_step=self.config.getfloat('fd-step') if finite_differences else None)

        print('{} generators, {} samples, seed {}, {}'.format(
            len(report.residuals), report.samples, report.seed,
            'exact' if report.exact else 'tolerance {:g}'.format(tolerance)))
        for index, generator in enumerate(algebra.generators):
            if report.generator_passed(index):
                status = Fore.GREEN + 'pass' + Fore.RESET
            else:
                status = Fore.RED + 'FAIL' + Fore.RESET
            print('{:>4} {:<17} {:.3e} {}'.format(index + 1, generator.family, report.residuals[index], status))

        if report.agreement > self.config.getfloat('agreement-tolerance'):
            logger.warning('full and reduced residuals differ by %g', report.agreement)
        if report.finite_differences is not None:
            print('finite differences: {:.3e}'.format(report.finite_differences))
            if report.finite_differences > self.config.getfloat('fd-tolerance'):
                logger.warning('finite-difference residual %g exceeds %g',
                               report.finite_differences, self.config.getfloat('fd-tolerance'))
        if report.closure is not None:
            print('closure: ' + (Fore.GREEN + 'closed' if report.closure else Fore.RED + 'NOT closed') + Fore.RESET)
        counts = report.counts
        print('N: kernel {}, invariant factors {}, elementary divisors {}'.format(
            counts.kernel, counts.partition, 'absent' if counts.divisors is None else counts.divisors))

        passed = len(report.residuals) - len(report.failures())
        color = Fore.GREEN if report.passed else Fore.RED
        print(color + '{}/{} generators pass'.format(passed, len(report.residuals)) + Fore.RESET)
        return report
