"""Sparse polynomials over Z in variables t1..tn.

Degrees inside this module are algebraic degrees; the cohomological
degree of a homogeneous polynomial is twice that and is only used at the
API boundary (see :meth:`Poly.cohomological_degree`).
"""
from functools import lru_cache
from itertools import combinations_with_replacement
from math import gcd

from .errors import DimensionError
from .exactla import extend_primitive, unimodular_inverse

__all__ = [
    "Poly",
    "LinearForm",
    "add",
    "mul",
    "congruent_mod_linear",
    "substitute_linear",
    "monomials_of_degree",
]


class Poly:
    """Immutable sparse polynomial: exponent tuple -> nonzero int."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n, terms=None):
        self.n = int(n)
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != self.n:
                    raise DimensionError(f"exponent {exp} has wrong length for n={self.n}")
                c = int(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
                    if not clean[exp]:
                        del clean[exp]
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n, i):
        """The variable t_{i+1} (0-based index ``i``)."""
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms)

    # queries
    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    def cohomological_degree(self):
        return 2 * self.degree()

    def _check(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other)
        if other.n != self.n:
            raise DimensionError(f"ambient ranks differ: {self.n} vs {other.n}")
        return other

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.constant(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def sorted_terms(self):
        """Terms in graded lexicographic order, largest first."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def set_variable_zero(self, i):
        """Substitute t_{i+1} = 0 and drop that variable (n decreases by one)."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                out[e[:i] + e[i + 1:]] = c
        return Poly(self.n - 1, out)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Poly({self.n}, {render(self)!r})"


def render(f, var="t"):
    """Text form such as ``2*t1^2*t2 - t3``; graded lexicographic order."""
    if f.is_zero():
        return "0"
    pieces = []
    for exp, c in f.sorted_terms():
        factors = []
        for i, k in enumerate(exp):
            if k == 1:
                factors.append(f"{var}{i + 1}")
            elif k > 1:
                factors.append(f"{var}{i + 1}^{k}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if not pieces:
            pieces.append(body if c > 0 else "-" + body)
        else:
            pieces.append(("+ " if c > 0 else "- ") + body)
    return " ".join(pieces)


class LinearForm:
    """The linear polynomial sum_j a_j t_j, given by its coefficient vector."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(int(x) for x in coeffs)

    @property
    def n(self):
        return len(self.coeffs)

    def is_primitive(self):
        g = 0
        for x in self.coeffs:
            g = gcd(g, x)
        return g == 1

    def as_poly(self):
        return Poly.linear(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"LinearForm({list(self.coeffs)})"


def add(f, g):
    return f + g


def mul(f, g):
    return f * g


def substitute_linear(f, M):
    """Replace each t_i by the linear form given by row i of ``M``."""
    n = f.n
    if len(M) != n or any(len(row) != n for row in M):
        raise DimensionError(f"substitution matrix must be {n}x{n}")
    images = [Poly.linear(row) for row in M]
    out = Poly.zero(n)
    for exp, c in f.terms.items():
        term = Poly.constant(n, c)
        for i, k in enumerate(exp):
            if k:
                term = term * images[i] ** k
        out = out + term
    return out


@lru_cache(maxsize=4096)
def _straightening_substitution(coeffs):
    # t = M^{-1} s with M's first row the linear form, so s1 = l(t)
    return tuple(tuple(row) for row in unimodular_inverse(extend_primitive(coeffs)))


def restriction_to_kernel(f, form, completion=None):
    """Image of ``f`` in Z[t]/(form), as a polynomial in n-1 new coordinates.

    The coordinates come from a unimodular change of variables sending
    ``form`` to the first coordinate.
    """
    if not isinstance(form, LinearForm):
        form = LinearForm(form)
    if form.n != f.n:
        raise DimensionError("linear form and polynomial live in different rings")
    if not form.is_primitive():
        raise ValueError(f"{form} is not primitive")
    if completion is None:
        sub = [list(r) for r in _straightening_substitution(form.coeffs)]
    else:
        if list(completion[0]) != list(form.coeffs):
            raise ValueError("completion must have the linear form as first row")
        sub = unimodular_inverse(completion)
    return substitute_linear(f, sub).set_variable_zero(0)


def congruent_mod_linear(f, g, form, completion=None):
    """True iff f - g lies in the ideal generated by the primitive ``form``."""
    return restriction_to_kernel(f - g, form, completion).is_zero()


def monomials_of_degree(n, d):
    """Exponent tuples of total degree ``d`` in ``n`` variables, grlex descending."""
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out
