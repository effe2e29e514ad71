import itertools

from linsym.structure import JordanStructure

EIGENVALUES = (-1, 0, 1, 2, 9)


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield [k] + rest


def structures(sizes_range, eigenvalues):
    """Non-scalar Jordan structures with the given sizes and eigenvalues."""
    for n in sizes_range:
        for sizes in partitions(n):
            for values in itertools.product(eigenvalues, repeat=len(sizes)):
                structure = JordanStructure(list(zip(values, sizes)))
                if not structure.is_scalar():
                    yield structure


def soundness_corpus():
    """Every 16th structure up to n = 4 plus hand-picked ones of size 5."""
    small = list(structures(range(2, 5), EIGENVALUES))
    larger = [[(0, 2), (0, 2), (9, 1)], [(-1, 3), (2, 2)], [(1, 1), (2, 1), (9, 1), (0, 2)], [(0, 5)],
              [(2, 2), (2, 2), (2, 1)], [(0, 3), (0, 2)], [(0, 2), (0, 1), (0, 1), (0, 1)]]
    return small[::16] + [JordanStructure(blocks) for blocks in larger]
