"""Hot kernels for modular rank computations.

The numba path is used when numba imports cleanly and the environment
variable ``TORUSPOSET_DISABLE_NUMBA`` is unset (or ``0``).  The numpy path
is always available and is what runs when the flag is set.
"""
import os

import numpy as np

DISABLE_NUMBA = os.environ.get("TORUSPOSET_DISABLE_NUMBA", "0") not in ("", "0")

try:
    if DISABLE_NUMBA:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


def _rank_mod_p_numpy(a, p):
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        below = np.nonzero(a[rank + 1:, c])[0] + rank + 1
        if below.size:
            factors = a[below, c][:, None]
            a[below] = (a[below] - factors * a[rank]) % p
        rank += 1
    return rank


@njit(cache=False)
def _rank_mod_p_numba(a, p):
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        piv = -1
        for r in range(rank, rows):
            if a[r, c] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(cols):
                tmp = a[rank, k]
                a[rank, k] = a[piv, k]
                a[piv, k] = tmp
        # modular inverse by square-and-multiply (p prime)
        base = a[rank, c]
        e = p - 2
        inv = 1
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for k in range(c, cols):
            a[rank, k] = (a[rank, k] * inv) % p
        for r in range(rank + 1, rows):
            f = a[r, c]
            if f != 0:
                for k in range(c, cols):
                    a[r, k] = (a[r, k] - f * a[rank, k]) % p
        rank += 1
    return rank


def rank_mod_p(a, p, backend=None):
    """Rank of an integer matrix over the prime field F_p.

    ``backend`` forces ``"numba"`` or ``"numpy"``; the default follows the
    module flag.  ``p`` must be a prime below 2**31 so products fit in int64.
    """
    if not 1 < p < 2**31:
        raise ValueError("prime modulus must lie in (1, 2**31)")
    if isinstance(a, np.ndarray) and a.dtype.kind in "iu":
        arr = a.astype(np.int64) % p
    else:
        arr = np.array(a, dtype=object)
        if arr.size == 0:
            return 0
        arr = (arr % p).astype(np.int64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if arr.size == 0:
        return 0
    if backend is None:
        backend = "numba" if HAVE_NUMBA else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return int(_rank_mod_p_numba(arr, np.int64(p)))
    if backend == "numpy":
        return _rank_mod_p_numpy(arr, p)
    raise ValueError(f"unknown backend {backend!r}")
