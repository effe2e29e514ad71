from colorama import Fore

from linsym.algebra import dimension_only
from linsym.algebra import structure_dimension
from linsym.structure import FREE


def system_dimension(system):
    """DimensionReport of a system, whatever form it was given in."""
    if system.jordan is not None:
        return structure_dimension(system.jordan)
    return dimension_only(system.reduced())


class DimCommand(object):
    def __init__(self, config):
        self.config = config

    def perform(self, system):
        """
        Print n, the invariant factor degrees, N, the classification and the dimension
        """
        report = system_dimension(system)

        print('n = {}'.format(system.n))
        print('partition = ({})'.format(', '.join(str(d) for d in report.partition)))
        if report.classification == FREE:
            print(Fore.YELLOW + 'dim = {}, N = {}, free system'.format(report.dimension, report.N) + Fore.RESET)
        else:
            print(Fore.GREEN + 'dim = {}, N = {}, {}'.format(
                report.dimension, report.N, report.classification.replace('_', '-')) + Fore.RESET)
        if system.has_forcing:
            print('forcing term C(t) removed by a particular solution shift')

        return report
