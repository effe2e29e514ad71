import logging

from colorama import Fore

from linsym.algebra import build_algebra
from linsym.algebra import build_free_algebra
from linsym.dim_command import system_dimension
from linsym.exppoly import FREQUENCY_TOLERANCE
from linsym.serialize import write_algebra
from linsym.structure import FREE

logger = logging.getLogger(__name__)


def system_algebra(system, mode='exact', tolerance=1e-9, frequency_tolerance=FREQUENCY_TOLERANCE):
    """Maximal Lie invariance algebra of a system, in canonical coordinates.

    Scalar systems get the algebra of x'' = 0.
    """
    if system_dimension(system).classification == FREE:
        structure = system.structure(tolerance)
        if any(b.eigenvalue != 0 for b in structure.blocks):
            logger.warning('scalar matrix %s E: generators are those of the equivalent free system x\'\' = 0',
                           structure.blocks[0].eigenvalue)
        return build_free_algebra(system.n, system.field)
    return build_algebra(system.structure(tolerance), mode, frequency_tolerance)


class AlgebraCommand(object):
    def __init__(self, config):
        self.config = config

    def perform(self, system, output=None, mode='exact'):
        """
        Build the generators, write them as an algebra file and print a summary table
        """
        algebra = system_algebra(system, mode, self.config.getfloat('cluster-tolerance'),
                                 self.config.getfloat('frequency-tolerance'))
        if output:
            write_algebra(algebra, output)
            logger.info('algebra written to %s', output)

        print(Fore.YELLOW + 'dim = {}, N = {}, {} ({})'.format(
            algebra.dimension, algebra.N, algebra.classification.replace('_', '-'),
            'numeric' if algebra.numeric else 'exact') + Fore.RESET)
        if algebra.structure is not None:
            print('structure: {}'.format(algebra.structure))
        for index, generator in enumerate(algebra.generators, 1):
            print('{:>4} {}{:<17}{} {}'.format(index, Fore.CYAN, generator.family, Fore.RESET, generator.render()))

        return algebra
