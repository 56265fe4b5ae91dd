"""The face ring of a simplicial poset.

Elements are kept in chain-monomial normal form: a monomial is a tuple of
``(element, exponent)`` pairs along a chain, ordered by rank.  Products of
incomparable generators are rewritten with

    v_s * v_t = v_{s ^ t} * sum over eta in (s v t) of v_eta,

which gives zero when s and t have no common upper bound.  Degrees are
algebraic (deg v_s = rank s); cohomological degree is twice that.
"""
import weakref
from functools import reduce

from .errors import DimensionError, ValidationError
from .exactla import ZZ, Coeffs, elementary_divisors, rank
from .parsing import parse_expression
from .polyring import Poly
from .sposet import BOTTOM, is_simplicial_complex, meets_joins, star, stellar_subdivide

__all__ = [
    "RingElement",
    "straighten_mul",
    "straighten",
    "restriction",
    "global_restriction",
    "hilbert_function",
    "chain_monomials",
    "linear_element",
    "lsop_check",
    "beta_map",
    "quotient_graded_dim",
    "parse_ring",
]

_CACHES = weakref.WeakKeyDictionary()


def _cache(P):
    c = _CACHES.get(P)
    if c is None:
        c = _CACHES[P] = {"mj": {}, "straight": {}, "chains": {}}
    return c


def _mj(P, s, t):
    key = (s, t) if s <= t else (t, s)
    c = _cache(P)["mj"]
    if key not in c:
        c[key] = meets_joins(P, *key)
    return c[key]


def _canon(P, gens):
    """Multiset of generators -> sorted (element, exponent) tuple."""
    counts = {}
    for x, a in gens:
        if x != BOTTOM:
            counts[x] = counts.get(x, 0) + a
    key = lambda x: (P.rank[x], x)
    return tuple((x, counts[x]) for x in sorted(counts, key=key))


def _incomparable_pairs(P, mono):
    xs = [x for x, _ in mono]
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if not P.leq(xs[i], xs[j]) and not P.leq(xs[j], xs[i]):
                yield xs[i], xs[j]


def _rewrite(P, mono, s, t):
    """Apply the straightening relation once to the pair (s, t)."""
    meets, joins = _mj(P, s, t)
    if not joins:
        return []
    (m,) = meets
    rest = []
    for x, a in mono:
        a -= (x == s) + (x == t)
        if a:
            rest.append((x, a))
    if m != BOTTOM:
        rest.append((m, 1))
    return [_canon(P, rest + [(eta, 1)]) for eta in sorted(joins)]


def straighten(P, mono, chooser=None):
    """Normal form of a product of generators as ``{chain monomial: coeff}``.

    The default schedule rewrites the first incomparable pair in (rank, id)
    order and memoizes; ``chooser`` (a callable picking one pair from a list)
    gives other schedules for confluence testing.
    """
    mono = _canon(P, mono)
    memo = _cache(P)["straight"] if chooser is None else {}
    return dict(_straighten(P, mono, chooser, memo))


def _straighten(P, mono, chooser, memo):
    hit = memo.get(mono)
    if hit is not None:
        return hit
    pairs = list(_incomparable_pairs(P, mono))
    if not pairs:
        out = {mono: 1}
    else:
        s, t = pairs[0] if chooser is None else chooser(pairs)
        out = {}
        for m in _rewrite(P, mono, s, t):
            for k, c in _straighten(P, m, chooser, memo).items():
                out[k] = out.get(k, 0) + c
        out = {k: c for k, c in out.items() if c}
    memo[mono] = out
    return out


class RingElement:
    """Element of Z[P] in chain-monomial normal form."""

    __slots__ = ("P", "terms")

    def __init__(self, P, terms=None):
        self.P = P
        self.terms = {k: int(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def one(cls, P):
        return cls(P, {(): 1})

    @classmethod
    def constant(cls, P, c):
        return cls(P, {(): c})

    @classmethod
    def gen(cls, P, x, power=1):
        if x not in P:
            raise KeyError(f"unknown element {x!r}")
        if x == BOTTOM:
            return cls.one(P)
        return cls(P, {((x, power),): 1})

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((_mono_degree(self.P, m) for m in self.terms), default=-1)

    def cohomological_degree(self):
        return 2 * self.degree()

    def is_homogeneous(self):
        return len({_mono_degree(self.P, m) for m in self.terms}) <= 1

    def _coerce(self, other):
        if isinstance(other, int):
            return RingElement.constant(self.P, other)
        if not isinstance(other, RingElement) or other.P is not self.P:
            raise DimensionError("ring elements over different posets")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return RingElement(self.P, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.P, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return straighten_mul(self.P, self, self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        return reduce(lambda a, b: a * b, [self] * k, RingElement.one(self.P))

    def __eq__(self, other):
        if isinstance(other, int):
            other = RingElement.constant(self.P, other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.P is other.P and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        P = self.P
        key = lambda kc: (-_mono_degree(P, kc[0]), [(P.rank[x], x, a) for x, a in kc[0]])
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            body = "*".join(f"v[{x}]" + (f"^{a}" if a > 1 else "") for x, a in mono)
            mag = abs(c)
            if not body:
                body = str(mag)
            elif mag != 1:
                body = f"{mag}*{body}"
            if not pieces:
                pieces.append(body if c > 0 else "-" + body)
            else:
                pieces.append(("+ " if c > 0 else "- ") + body)
        return " ".join(pieces)

    __repr__ = __str__


def _mono_degree(P, mono):
    return sum(P.rank[x] * a for x, a in mono)


def straighten_mul(P, x, y, chooser=None):
    out = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            for m, c in straighten(P, m1 + m2, chooser).items():
                out[m] = out.get(m, 0) + c1 * c2 * c
    return RingElement(P, out)


def parse_ring(P, text):
    """Parse expressions such as ``v[e]*v[g] - v[p]`` over the poset ``P``."""
    def var(tok):
        x = tok[2:-1]
        if x not in P:
            raise ValidationError(f"unknown poset element {x!r}", x)
        return RingElement.gen(P, x)

    return parse_expression(text, r"v\[(?:[^\[\]]|\[[^\[\]]*\])+\]", var, lambda c: RingElement.constant(P, c))


# ----- restrictions ------------------------------------------------

def restriction(P, x, s):
    """Image of ``x`` in the polynomial ring on atoms(s) (sorted), as a Poly."""
    atoms = sorted(P.atoms(s)) if s != BOTTOM else []
    idx = {v: i for i, v in enumerate(atoms)}
    n = len(atoms)
    terms = {}
    below = P.below(s)
    for mono, c in x.terms.items():
        if any(t not in below for t, _ in mono):
            continue
        e = [0] * n
        for t, a in mono:
            for v in P.atoms(t):
                e[idx[v]] += a
        e = tuple(e)
        terms[e] = terms.get(e, 0) + c
    return Poly(n, terms)


def global_restriction(P, x):
    return {s: restriction(P, x, s) for s in P.maximal()}


# ----- Hilbert function and bases --------------------------------------

def hilbert_function(P, d):
    """Number of chain monomials of algebraic degree ``d``."""
    if d < 0:
        return 0
    c = _cache(P)["chains"]
    key = ("hf", d)
    if key not in c:
        g = {}
        total = [0] * (d + 1)
        total[0] = 1
        for t in P.proper:
            r = P.rank[t]
            inner = [0] * (d + 1)
            inner[0] = 1
            for rho in P.below(t):
                if rho != t and rho != BOTTOM:
                    inner = [a + b for a, b in zip(inner, g[rho])]
            # multiply by t^r / (1 - t^r)
            out = [0] * (d + 1)
            for k in range(r, d + 1):
                out[k] = inner[k - r] + out[k - r]
            g[t] = out
            total = [a + b for a, b in zip(total, out)]
        c[key] = total[d]
    return c[key]


def chain_monomials(P, d):
    """All chain monomials of algebraic degree ``d``, in a fixed order."""
    c = _cache(P)["chains"]
    if ("list", d) in c:
        return c[("list", d)]
    ending = {}

    def ending_at(t, k):
        # chain monomials of degree k whose largest element is t
        key = (t, k)
        if key in ending:
            return ending[key]
        out = []
        r = P.rank[t]
        for a in range(1, k // r + 1):
            rest = k - a * r
            if rest == 0:
                out.append(((t, a),))
            else:
                for rho in sorted(P.below(t) - {t, BOTTOM}, key=lambda y: (P.rank[y], y)):
                    out.extend(m + ((t, a),) for m in ending_at(rho, rest))
        ending[key] = out
        return out

    if d == 0:
        res = [()]
    else:
        res = [m for t in P.proper for m in ending_at(t, d)]
    c[("list", d)] = res
    return res


# ----- linear elements and lsops ----------------------------------------

def linear_element(P, coeffs):
    """Degree-one element sum coeffs[v] * v_v over vertices ``v``."""
    terms = {}
    for v, a in coeffs.items():
        if P.rank.get(v) != 1:
            raise ValidationError(f"{v!r} is not a vertex", v)
        if a:
            terms[((v, 1),)] = a
    return RingElement(P, terms)


def _as_linear(P, theta):
    if isinstance(theta, RingElement):
        out = {}
        for mono, c in theta.terms.items():
            if len(mono) != 1 or mono[0][1] != 1 or P.rank[mono[0][0]] != 1:
                raise ValidationError(f"{theta} is not a linear element")
            out[mono[0][0]] = c
        return out
    return {v: int(a) for v, a in theta.items()}


def lsop_check(P, thetas, coeffs=ZZ):
    """Return ``(ok, failing simplex or None)``.

    At every simplex s the n x rk(s) coefficient matrix on atoms(s) must
    have full column rank over a field, or be onto Z^rk(s) over Z.
    """
    if isinstance(coeffs, str):
        coeffs = Coeffs.parse(coeffs)
    if len(thetas) != P.n:
        raise DimensionError(f"need exactly {P.n} linear elements, got {len(thetas)}")
    lin = [_as_linear(P, th) for th in thetas]
    for s in P.proper:
        atoms = sorted(P.atoms(s))
        M = [[th.get(v, 0) for v in atoms] for th in lin]
        r = len(atoms)
        if coeffs.kind == "z":
            divs = elementary_divisors(M)
            ok = len(divs) == r and all(d == 1 for d in divs)
        else:
            ok = rank(M, coeffs) == r
        if not ok:
            return False, s
    return True, None


# ----- the beta map under stellar subdivision ----------------------------

def beta_map(P, s, x, Q=None):
    """Image of ``x`` under the ring map k[P] -> k[Q], Q the stellar
    subdivision of P at ``s``.

    Generators outside st(s) are kept; a generator inside the star is first
    written as a product of its vertices minus the other elements with the
    same vertex set, and vertices i of s go to v + v_i.
    """
    if s == BOTTOM or s not in P:
        raise ValidationError(f"cannot subdivide at {s!r}", s)
    st = star(P, s)
    if not is_simplicial_complex(st):
        raise ValidationError(f"the star of {s!r} is not a simplicial complex", s)
    if Q is None:
        Q = stellar_subdivide(P, s)
    v = f"v@{s}"
    if v not in Q or Q.rank[v] != 1:
        raise ValidationError("subdivision does not carry the expected new vertex", v)
    image = {}
    sv = P.atoms(s)

    def img(t):
        if t in image:
            return image[t]
        if t not in st:
            out = RingElement.gen(Q, t)
        elif P.rank[t] == 1:
            out = RingElement.gen(Q, t)
            if t in sv:
                out = out + RingElement.gen(Q, v)
        else:
            out = RingElement.one(Q)
            for a in sorted(P.atoms(t)):
                out = out * img(a)
            for eta in P.of_rank(P.rank[t]):
                if eta != t and P.atoms(eta) == P.atoms(t):
                    out = out - img(eta)
        image[t] = out
        return out

    result = RingElement(Q)
    for mono, c in x.terms.items():
        term = RingElement.constant(Q, c)
        for t, a in mono:
            term = term * img(t) ** a
        result = result + term
    return result


# ----- quotient by an lsop ---------------------------------------------

def quotient_graded_dim(P, thetas, d, coeffs):
    """Dimension of the degree-d piece of k[P]/(thetas) over a field."""
    if isinstance(coeffs, str):
        coeffs = Coeffs.parse(coeffs)
    if not coeffs.is_field:
        raise ValueError("quotient dimensions need field coefficients")
    ok, bad = lsop_check(P, thetas, coeffs)
    if not ok:
        raise ValidationError(f"not an lsop: fails at {bad!r}", bad)
    basis = chain_monomials(P, d)
    if d == 0:
        return len(basis)
    index = {m: i for i, m in enumerate(basis)}
    lin = [linear_element(P, _as_linear(P, th)) for th in thetas]
    rows = []
    for m in chain_monomials(P, d - 1):
        mono = RingElement(P, {m: 1})
        for th in lin:
            prod = straighten_mul(P, th, mono)
            row = {index[k]: c for k, c in prod.terms.items()}
            if row:
                rows.append(row)
    if not rows:
        return len(basis)
    dense = [[row.get(j, 0) for j in range(len(basis))] for row in rows]
    return len(basis) - rank(dense, coeffs)
