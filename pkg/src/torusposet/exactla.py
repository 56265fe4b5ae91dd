"""Exact linear algebra over the integers.

Matrices are lists of rows of Python ints, so entries never overflow.
The modular rank is the one place where fixed-width arithmetic is used,
through :func:`torusposet._accel.rank_mod_p`.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from ._accel import rank_mod_p
from .errors import DimensionError

__all__ = [
    "Coeffs",
    "SNFDecomposition",
    "smith_normal_form",
    "elementary_divisors",
    "hermite_normal_form",
    "rank",
    "rank_q",
    "determinant",
    "is_lattice_basis",
    "dual_basis",
    "extend_primitive",
    "unimodular_inverse",
    "matmul",
    "identity",
]


@dataclass(frozen=True)
class Coeffs:
    """Coefficient system: the integers, the rationals or a prime field."""

    kind: str  # "z", "q" or "fp"
    p: int = 0

    @classmethod
    def parse(cls, text):
        t = str(text).strip().lower()
        if t in ("z", "zz"):
            return cls("z")
        if t in ("q", "qq"):
            return cls("q")
        if t.startswith("fp:"):
            p = int(t[3:])
        elif t.startswith("f") and t[1:].isdigit():
            p = int(t[1:])
        else:
            raise ValueError(f"unknown coefficient system {text!r}; use z, q or fp:<prime>")
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        return cls("fp", p)

    @property
    def is_field(self):
        return self.kind != "z"

    def __str__(self):
        return f"fp:{self.p}" if self.kind == "fp" else self.kind


ZZ = Coeffs("z")
QQ = Coeffs("q")


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _shape(a, ncols=None):
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    for row in a:
        if len(row) != n:
            raise DimensionError("ragged matrix")
    return m, n


def matmul(a, b):
    m, k = _shape(a)
    k2, n = _shape(b)
    if k != k2 and m and k2:
        raise DimensionError(f"cannot multiply {m}x{k} by {k2}x{n}")
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


@dataclass(frozen=True)
class SNFDecomposition:
    """``U * A * V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: list
    D: list
    V: list

    @property
    def divisors(self):
        """Nonzero diagonal entries of ``D``, in divisibility order."""
        out = []
        for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)):
            if self.D[i][i]:
                out.append(self.D[i][i])
        return out


def smith_normal_form(a, ncols=None):
    """Smith normal form with unimodular transforms.

    Uses the entry of least absolute value as pivot at every stage.
    ``ncols`` gives the column count when ``a`` has no rows.
    """
    m, n = _shape(a, ncols)
    D = [[int(x) for x in row] for row in a]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def row_axpy(dst, src, q):
        # row_dst -= q * row_src
        for M in (D, U):
            rd, rs = M[dst], M[src]
            for k in range(len(rd)):
                if rs[k]:
                    rd[k] -= q * rs[k]

    def col_axpy(dst, src, q):
        for M in (D, V):
            for row in M:
                if row[src]:
                    row[dst] -= q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            clean = True
            piv = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    row_axpy(i, t, D[i][t] // piv)
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    col_axpy(j, t, D[t][j] // piv)
                    if D[t][j]:
                        clean = False
            if not clean:
                best = (abs(D[t][t]), t, t)
                for i in range(t + 1, m):
                    if D[i][t] and abs(D[i][t]) < best[0]:
                        best = (abs(D[i][t]), i, t)
                for j in range(t + 1, n):
                    if D[t][j] and abs(D[t][j]) < best[0]:
                        best = (abs(D[t][j]), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_axpy(t, bad, -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SNFDecomposition(U, D, V)


def _sparse_rows(a):
    # rows may be dense sequences or {column: value} dicts
    return [
        {j: int(x) for j, x in (row.items() if isinstance(row, dict) else enumerate(row)) if x}
        for row in a
    ]


def _eliminate_units(rows):
    """Remove unit pivots in place; returns how many were removed."""
    cols = {}
    for i, row in enumerate(rows):
        for j in row:
            cols.setdefault(j, set()).add(i)
    alive = set(i for i, row in enumerate(rows) if row)
    count = 0
    progress = True
    while progress:
        progress = False
        for i in sorted(alive, key=lambda r: len(rows[r])):
            if i not in alive:
                continue
            row = rows[i]
            units = [j for j, x in row.items() if x in (1, -1)]
            if not units:
                continue
            j = min(units, key=lambda c: len(cols[c]))
            u = row[j]
            for k in list(cols[j]):
                if k == i:
                    continue
                rk = rows[k]
                f = rk[j] * u
                for c, x in row.items():
                    y = rk.get(c, 0) - f * x
                    if y:
                        if c not in rk:
                            cols.setdefault(c, set()).add(k)
                        rk[c] = y
                    elif c in rk:
                        del rk[c]
                        cols[c].discard(k)
                if not rk:
                    alive.discard(k)
            for c in row:
                cols[c].discard(i)
            rows[i] = {}
            alive.discard(i)
            count += 1
            progress = True
    return count


def elementary_divisors(a, ncols=None):
    """Nonzero elementary divisors of ``a`` (no transforms tracked).

    Unit pivots are eliminated sparsely first, which disposes of most of a
    boundary matrix; whatever remains goes through the dense Smith form.
    """
    rows = _sparse_rows(a)
    units = _eliminate_units(rows)
    rest = [r for r in rows if r]
    if not rest:
        return [1] * units
    used = sorted(set(c for r in rest for c in r))
    index = {c: k for k, c in enumerate(used)}
    dense = []
    for r in rest:
        d = [0] * len(used)
        for c, x in r.items():
            d[index[c]] = x
        dense.append(d)
    return [1] * units + smith_normal_form(dense).divisors


def rank_q(a):
    """Rank over the rationals via fraction-free sparse elimination."""
    rows = [r for r in _sparse_rows(a) if r]
    r = _eliminate_units(rows)
    rows = [row for row in rows if row]
    while rows:
        rows.sort(key=len)
        piv_row = rows.pop(0)
        j = min(piv_row, key=lambda c: abs(piv_row[c]))
        p = piv_row[j]
        new_rows = []
        for row in rows:
            x = row.get(j)
            if x:
                merged = {}
                for c in set(row) | set(piv_row):
                    y = p * row.get(c, 0) - x * piv_row.get(c, 0)
                    if y:
                        merged[c] = y
                row = merged
                if row:
                    g = 0
                    for y in row.values():
                        g = gcd(g, y)
                    if g > 1:
                        row = {c: y // g for c, y in row.items()}
            if row:
                new_rows.append(row)
        rows = new_rows
        r += 1
    return r


def rank(a, coeffs=ZZ, backend=None):
    """Rank of an integer matrix over the given coefficient system.

    Over the integers this is the rank of the image lattice, which equals
    the rational rank.
    """
    if not a or not a[0]:
        return 0
    if coeffs.kind == "fp":
        return rank_mod_p(a, coeffs.p, backend=backend)
    return rank_q(a)


def determinant(a):
    """Exact determinant by Bareiss fraction-free elimination."""
    n, m = _shape(a)
    if n != m:
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [[int(x) for x in row] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _check_square_family(vectors):
    n = len(vectors)
    for v in vectors:
        if len(v) != n:
            raise DimensionError(f"expected {n} vectors of length {n}")
    return n


def is_lattice_basis(vectors):
    """True iff the ``n`` integer vectors of length ``n`` form a basis of Z^n."""
    _check_square_family(vectors)
    return abs(determinant(vectors)) == 1


def unimodular_inverse(a):
    """Inverse of an integer matrix with determinant +-1."""
    n = _check_square_family(a)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    out = []
    for row in M:
        tail = row[n:]
        if any(x.denominator != 1 for x in tail):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in tail])
    return out


def dual_basis(basis):
    """Dual lattice basis: ``<out[i], basis[j]> == delta_ij``."""
    if not is_lattice_basis(basis):
        raise ValueError("input is not a lattice basis")
    inv = unimodular_inverse(basis)  # columns of inv are the duals
    n = len(basis)
    return [[inv[k][i] for k in range(n)] for i in range(n)]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def extend_primitive(v):
    """Unimodular matrix whose first row is the primitive ``v``.

    The determinant is 1 except for the 1x1 case ``v = (-1)``.
    """
    v = [int(x) for x in v]
    n = len(v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g != 1:
        raise ValueError(f"vector {v} is not primitive")
    if n == 1:
        return [v]
    # Column-reduce v to e_1 with a unimodular W (v W = e_1); then the first
    # row of W^{-1} is v.
    W = identity(n)
    w = list(v)
    for j in range(1, n):
        if w[j] == 0:
            continue
        a, b = w[0], w[j]
        d, x, y = _xgcd(a, b)
        # [[x, -b/d], [y, a/d]] acting on columns 0 and j
        p, q = -b // d, a // d
        for row in W:
            c0, cj = row[0], row[j]
            row[0], row[j] = x * c0 + y * cj, p * c0 + q * cj
        w[0], w[j] = d, 0
    if w[0] == -1:
        for row in W:
            row[0] = -row[0]
    M = unimodular_inverse(W)
    if determinant(M) == -1:
        M[-1] = [-x for x in M[-1]]
    # normalise the completion: reduce lower rows modulo the first row at
    # the first nonzero position of v
    j = next(k for k, x in enumerate(v) if x)
    for i in range(1, n):
        k = -(M[i][j] // abs(v[j])) * (1 if v[j] > 0 else -1)
        if k:
            M[i] = [x + k * y for x, y in zip(M[i], v)]
    return M


def hermite_normal_form(a):
    """Row-style Hermite normal form (upper triangular, positive pivots,
    entries above a pivot reduced into ``[0, pivot)``); zero rows dropped."""
    rows = [[int(x) for x in r] for r in a]
    if not rows:
        return []
    m, n = _shape(rows)
    out = []
    r = 0
    for c in range(n):
        active = [i for i in range(r, m) if rows[i][c]]
        if not active:
            continue
        while True:
            active = [i for i in range(r, m) if rows[i][c]]
            piv = min(active, key=lambda i: abs(rows[i][c]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, m):
                if rows[i][c]:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][c]:
                        done = False
            if done:
                break
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    out = [row for row in rows[:r]]
    return out
