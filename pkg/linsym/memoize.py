from functools import wraps
import pickle


def memoize(slots=4096):
    """Decorator function to implement a session cache.

    >>> @memoize()
    ... def test_func(a):
    ...     return a

    Every memoized function owns a dictionary cache that is registered so
    memoize_session_reset() can drop all of them at once.

    >>> test_func(1)
    1
    >>> len(test_func._memoize_session_cache)
    1

    There is a limit of the size of the cache; when it is reached the
    oldest quarter of the slots is removed.
    """

    # Configuration variables
    NCLEAN = slots // 4     # Number of slots to remove when limit reached

    if not hasattr(memoize, 'session_functions'):
        memoize.session_functions = []

    def _memoize(fn):
        def _clean_cache(cache):
            len_cache = len(cache)
            if len_cache >= slots:
                nclean = NCLEAN + len_cache - slots
                # Insertion order, so the first keys are the oldest.
                for key in list(cache)[:nclean]:
                    del cache[key]

        def _key(obj):
            # Pickle doesn't guarantee that there is a single
            # representation for every serialization.  We can try to
            # picke / depickle twice to have a canonical
            # representation.
            key = pickle.dumps(obj, protocol=-1)
            key = pickle.dumps(pickle.loads(key), protocol=-1)
            return key

        @wraps(fn)
        def _fn(*args, **kwargs):
            # Keyed on str() so sympy matrices compare by value.
            key = _key((tuple(str(a) for a in args),
                        tuple(sorted((k, str(v)) for k, v in kwargs.items()))))
            cache = _fn._memoize_session_cache
            if key in cache:
                return cache[key]
            value = fn(*args, **kwargs)
            cache[key] = value
            _clean_cache(cache)
            return value

        _fn._memoize_session_cache = {}
        memoize.session_functions.append(_fn)
        return _fn

    return _memoize


def memoize_session_reset():
    """Reset all session caches."""
    for fn in getattr(memoize, 'session_functions', []):
        fn._memoize_session_cache = {}
