from collections import namedtuple

from colorama import Fore

from linsym.algebra import dimension_bounds
from linsym.algebra import missing_intervals
from linsym.algebra import realizable_dimensions

ScanReport = namedtuple('ScanReport', ['n', 'dimensions', 'bounds', 'missing', 'intervals'])


class ScanCommand(object):
    def __init__(self, config):
        self.config = config

    def perform(self, n):
        """
        Print the algebra dimensions attained by non-scalar n x n matrices
        """
        min_n, max_n = self.config.getint('scan-min-n'), self.config.getint('scan-max-n')
        dimensions = realizable_dimensions(n, min_n, max_n)
        low, high = dimension_bounds(n)
        missing = [value for value in range(low, high + 1) if value not in dimensions]
        intervals = missing_intervals(n, min_n, max_n)

        print('n = {}'.format(n))
        print('dimensions: {}'.format(', '.join(str(d) for d in sorted(dimensions))))
        if missing:
            print(Fore.YELLOW + 'missing: {}'.format(', '.join(str(m) for m in missing)) + Fore.RESET)
            for first, last in intervals:
                print('  gap [{}, {}]'.format(first, last))
        else:
            print(Fore.GREEN + 'all of [{}, {}] attained'.format(low, high) + Fore.RESET)

        return ScanReport(n, dimensions, (low, high), missing, intervals)
