"""Simplicial posets: validation, f/h-vectors, stars and links,
stellar and barycentric subdivision, pseudomanifolds, isomorphism.

A poset is stored as a rank table and a cover relation (``down[x]`` is the
set of elements covered by ``x``).  The minimum is the reserved id
``BOTTOM`` and is never written to files.
"""
import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .errors import ValidationError

BOTTOM = "^0"

__all__ = [
    "BOTTOM",
    "SimplicialPoset",
    "FHVector",
    "DSResult",
    "PseudomanifoldReport",
    "validate_poset",
    "poset_from_facets",
    "meets_joins",
    "is_simplicial_complex",
    "fh_vector",
    "chi_upper",
    "dehn_sommerville",
    "star",
    "boundary_star",
    "link",
    "stellar_subdivide",
    "barycentric_subdivide",
    "order_complex",
    "is_pseudomanifold",
    "orient_pseudomanifold",
    "poset_isomorphic",
    "load_poset",
    "save_poset",
    "poset_to_dict",
    "dumps_poset",
]


def _sort_key(rank):
    return lambda x: (rank[x], x)


class SimplicialPoset:
    """A finite simplicial poset; immutable after construction."""

    def __init__(self, rank, down, check=True):
        self.rank = dict(rank)
        self.rank[BOTTOM] = 0
        self.down = {x: frozenset(down.get(x, ())) for x in self.rank}
        self.down[BOTTOM] = frozenset()
        self.meta = {}  # extra file keys, kept for round trips
        if check:
            self._validate()

    # ----- structure -------------------------------------------------
    @cached_property
    def elements(self):
        """All elements including BOTTOM, ordered by (rank, id)."""
        return tuple(sorted(self.rank, key=_sort_key(self.rank)))

    @cached_property
    def proper(self):
        """Elements other than BOTTOM."""
        return self.elements[1:]

    @cached_property
    def n(self):
        return max(self.rank.values())

    @cached_property
    def up(self):
        up = {x: set() for x in self.rank}
        for x, ds in self.down.items():
            for y in ds:
                up[y].add(x)
        return {x: frozenset(s) for x, s in up.items()}

    @cached_property
    def _below(self):
        below = {}
        for x in self.elements:
            s = {x}
            for y in self.down[x]:
                s |= below[y]
            below[x] = frozenset(s)
        return below

    @cached_property
    def _above(self):
        above = {}
        for x in reversed(self.elements):
            s = {x}
            for y in self.up[x]:
                s |= above[y]
            above[x] = frozenset(s)
        return above

    @cached_property
    def _atoms(self):
        atoms = {}
        for x in self.elements:
            if self.rank[x] == 1:
                atoms[x] = frozenset((x,))
            else:
                s = set()
                for y in self.down[x]:
                    s |= atoms[y]
                atoms[x] = frozenset(s)
        return atoms

    def below(self, x):
        return self._below[x]

    def above(self, x):
        return self._above[x]

    def atoms(self, x):
        return self._atoms[x]

    def leq(self, a, b):
        return a in self._below[b]

    def vertices(self):
        return [x for x in self.proper if self.rank[x] == 1]

    def of_rank(self, r):
        return [x for x in self.elements if self.rank[x] == r]

    def maximal(self):
        return [x for x in self.proper if not self.up[x]] or [BOTTOM]

    def face_with_atoms(self, sigma, atoms):
        """The unique element below ``sigma`` whose atom set is ``atoms``."""
        atoms = frozenset(atoms)
        for y in self._below[sigma]:
            if self._atoms[y] == atoms:
                return y
        raise KeyError(f"no face of {sigma} with atoms {sorted(atoms)}")

    def __contains__(self, x):
        return x in self.rank

    def __len__(self):
        return len(self.rank)

    def __repr__(self):
        return f"SimplicialPoset(rank={self.n}, elements={len(self.rank)})"

    def subposet(self, keep):
        """Induced sub-poset on a downward closed set ``keep``."""
        keep = set(keep) | {BOTTOM}
        return SimplicialPoset(
            {x: self.rank[x] for x in keep},
            {x: self.down[x] & keep for x in keep},
            check=False,
        )

    def relabel(self, mapping):
        """Rename elements (``mapping`` must be injective on proper elements)."""
        m = dict(mapping)
        m[BOTTOM] = BOTTOM
        return SimplicialPoset(
            {m[x]: r for x, r in self.rank.items()},
            {m[x]: {m[y] for y in ds} for x, ds in self.down.items()},
            check=False,
        )

    # ----- validation ------------------------------------------------
    def _validate(self):
        for x, r in self.rank.items():
            if x != BOTTOM and (not isinstance(r, int) or r < 1):
                raise ValidationError(f"element {x!r} has invalid rank {r!r}", x)
            for y in self.down[x]:
                if y not in self.rank:
                    raise ValidationError(f"element {x!r} covers unknown element {y!r}", x)
                if self.rank[y] != r - 1:
                    raise ValidationError(
                        f"rank inconsistency: {x!r} (rank {r}) covers {y!r} (rank {self.rank[y]})", x)
            if x != BOTTOM and not self.down[x]:
                raise ValidationError(f"element {x!r} covers nothing (missing 0^)", x)
        for x in self.elements:
            r = self.rank[x]
            atoms = self._atoms[x]
            below = self._below[x]
            if len(atoms) != r:
                raise ValidationError(
                    f"lower interval of {x!r} is not boolean: {len(atoms)} atoms but rank {r}", x)
            if len(below) != 2 ** r or len({self._atoms[y] for y in below}) != len(below):
                raise ValidationError(f"lower interval of {x!r} is not boolean", x)


def validate_poset(raw):
    """Build a validated poset from the file dictionary or a poset instance.

    The dictionary has ``rank_max`` and ``elements`` (each with ``id``,
    ``rank`` and ``covers``); the minimum is implicit.
    """
    if isinstance(raw, SimplicialPoset):
        return SimplicialPoset(raw.rank, raw.down, check=True)
    try:
        elements = raw["elements"]
        rank_max = int(raw.get("rank_max", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed poset description: {exc}") from exc
    if not isinstance(elements, list) or not all(isinstance(el, dict) and "id" in el for el in elements):
        raise ValidationError("malformed poset description: elements must be objects with an id")
    rank, down = {}, {}
    for el in elements:
        x = str(el["id"])
        if x == BOTTOM:
            raise ValidationError(f"id {BOTTOM!r} is reserved for the minimum", x)
        if x in rank:
            raise ValidationError(f"duplicate element id {x!r}", x)
        try:
            rank[x] = int(el["rank"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"element {x!r} has a non-integer rank", x) from exc
        covers = [str(c) for c in el.get("covers", [])]
        down[x] = set(covers) if covers else ({BOTTOM} if rank[x] == 1 else set())
    P = SimplicialPoset(rank, down, check=True)
    if rank and P.n != rank_max:
        raise ValidationError(f"rank_max is {rank_max} but the maximal rank is {P.n}")
    P.meta = {k: v for k, v in raw.items() if k not in ("rank_max", "elements")}
    return P


def poset_from_facets(facets):
    """Face poset of the simplicial complex generated by ``facets``.

    Vertex names are kept; a simplex on vertices a, b, c is named ``a,b,c``
    (sorted).
    """
    faces = set()
    for F in facets:
        F = tuple(sorted(str(v) for v in F))
        for k in range(1, len(F) + 1):
            faces.update(combinations(F, k))
    name = {f: ",".join(f) for f in faces}
    rank = {name[f]: len(f) for f in faces}
    down = {}
    for f in faces:
        if len(f) == 1:
            down[name[f]] = {BOTTOM}
        else:
            down[name[f]] = {name[f[:i] + f[i + 1:]] for i in range(len(f))}
    return SimplicialPoset(rank, down)


# ----- file format ----------------------------------------------------

def poset_to_dict(P):
    out = {
        "rank_max": str(P.n),
        "elements": [
            {
                "id": x,
                "rank": str(P.rank[x]),
                "covers": sorted(y for y in P.down[x] if y != BOTTOM),
            }
            for x in P.proper
        ],
    }
    out.update(P.meta)
    return out


def dumps_poset(P):
    return json.dumps(poset_to_dict(P), indent=2, ensure_ascii=False) + "\n"


def save_poset(P, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_poset(P))


def load_poset(path):
    with open(path, encoding="utf-8") as fh:
        return validate_poset(json.load(fh))


# ----- meets, joins, complexes -----------------------------------------

def meets_joins(P, s, t):
    """(maximal common lower bounds, minimal common upper bounds)."""
    common_up = P.above(s) & P.above(t)
    joins = {x for x in common_up if not any(y != x and P.leq(y, x) for y in common_up)}
    common_down = P.below(s) & P.below(t)
    meets = {x for x in common_down if not any(y != x and P.leq(x, y) for y in common_down)}
    return frozenset(meets), frozenset(joins)


def is_simplicial_complex(P):
    """True iff every pair has at most one join.

    Equivalently the atom-set map is injective, which is what is tested.
    """
    seen = set()
    for x in P.proper:
        a = P.atoms(x)
        if a in seen:
            return False
        seen.add(a)
    return True


# ----- f- and h-vectors, Dehn-Sommerville -----------------------------

@dataclass(frozen=True)
class FHVector:
    f: tuple  # f_{-1}, ..., f_{n-1}
    h: tuple  # h_0, ..., h_n


def _f_from_ranks(P):
    n = P.n
    f = [0] * (n + 1)
    for x in P.elements:
        f[P.rank[x]] += 1
    return f


def h_from_f(f):
    n = len(f) - 1
    return [
        sum(f[i] * comb(n - i, k - i) * (-1) ** (k - i) for i in range(k + 1))
        for k in range(n + 1)
    ]


def fh_vector(P):
    f = _f_from_ranks(P)
    return FHVector(tuple(f), tuple(h_from_f(f)))


def euler_characteristic(P):
    """Alternating count over ranks >= 1 (Euler characteristic of |P|)."""
    f = _f_from_ranks(P)
    return sum((-1) ** (i - 1) * f[i] for i in range(1, len(f)))


def chi_upper(P, s):
    return sum(1 if P.rank[t] % 2 else -1 for t in P.above(s))


def _shift_power(k):
    # coefficients of (t - 1)^k, index = power of t
    return [comb(k, j) * (-1) ** (k - j) for j in range(k + 1)]


@dataclass(frozen=True)
class DSResult:
    lhs: tuple
    rhs: tuple
    equal: bool
    defect: tuple

    def __bool__(self):
        return self.equal


def dehn_sommerville(P):
    """Both sides of the generalised Dehn-Sommerville identity.

    ``lhs[i]`` is h_{n-i} - h_i, from the h-vector; ``rhs`` is the expansion
    of sum over sigma of (1 + (-1)^n chi(P>=sigma)) (t-1)^(n - rk sigma),
    computed from upper Euler characteristics only.
    """
    n = P.n
    h = fh_vector(P).h
    lhs = [h[n - i] - h[i] for i in range(n + 1)]
    rhs = [0] * (n + 1)
    for s in P.elements:
        c = 1 + (-1 if n % 2 else 1) * chi_upper(P, s)
        if c:
            for j, a in enumerate(_shift_power(n - P.rank[s])):
                rhs[j] += c * a
    return DSResult(tuple(lhs), tuple(rhs), lhs == rhs, tuple(lhs))


# ----- stars and links -----------------------------------------------

def _star_set(P, s):
    out = set()
    for t in P.above(s):
        out |= P.below(t)
    return out


def star(P, s):
    return P.subposet(_star_set(P, s))


def boundary_star(P, s):
    if s == BOTTOM:
        raise ValueError("boundary of the star of the minimum is undefined")
    return P.subposet({t for t in _star_set(P, s) if not P.leq(s, t)})


def link(P, s):
    if s == BOTTOM:
        raise ValueError("link of the minimum is undefined")
    keep = set()
    for t in _star_set(P, s):
        meets, _ = meets_joins(P, s, t)
        if meets == {BOTTOM}:
            keep.add(t)
    return P.subposet(keep)


# ----- subdivisions --------------------------------------------------

class _Workspace:
    """Mutable copy of a poset used to run stellar subdivisions in sequence."""

    def __init__(self, P):
        self.rank = dict(P.rank)
        self.down = {x: set(ds) for x, ds in P.down.items()}
        self.up = {x: set(us) for x, us in P.up.items()}
        self.atoms = {x: P.atoms(x) if x != BOTTOM else frozenset() for x in P.rank}

    def _fresh(self, name):
        while name in self.rank:
            name += "'"
        return name

    def below(self, x):
        out = {x}
        stack = [x]
        while stack:
            for y in self.down[stack.pop()]:
                if y not in out:
                    out.add(y)
                    stack.append(y)
        return out

    def above(self, x):
        out = {x}
        stack = [x]
        while stack:
            for y in self.up[stack.pop()]:
                if y not in out:
                    out.add(y)
                    stack.append(y)
        return out

    def stellar(self, s):
        """Subdivide at ``s``; returns the id of the new vertex.

        Each simplex eta >= s is coned from a new vertex v over the faces
        rho <= eta not containing s.  The cone cell is indexed by the pair
        (rho, eta') where eta' <= eta is the face spanned by s and rho, so
        cells glued along rho inside the same eta' are identified, and
        cells that only share their boundary stay distinct.
        """
        if s == BOTTOM:
            raise ValueError("cannot subdivide at the minimum")
        removed = self.above(s)
        s_atoms = self.atoms[s]
        pairs = set()
        for eta in removed:
            by_atoms = {self.atoms[y]: y for y in self.below(eta)}
            for rho in by_atoms.values():
                if rho in removed:
                    continue
                if by_atoms[s_atoms | self.atoms[rho]] == eta:
                    pairs.add((rho, eta))
        per_rho = {}
        for rho, eta in pairs:
            per_rho.setdefault(rho, []).append(eta)
        vid = self._fresh(f"v@{s}")
        names = {}
        for rho, eta in sorted(pairs, key=lambda p: (self.rank[p[0]], p)):
            if rho == BOTTOM:
                names[(rho, eta)] = vid
            elif len(per_rho[rho]) == 1:
                names[(rho, eta)] = f"{rho}*{vid}"
            else:
                names[(rho, eta)] = f"{rho}*{vid}/{eta}"
        # names must be fresh with respect to surviving elements
        for key, nm in list(names.items()):
            if nm in self.rank and nm not in removed:
                names[key] = self._fresh(nm)
        new_rank, new_down, new_atoms = {}, {}, {}
        for (rho, eta), nm in names.items():
            new_rank[nm] = self.rank[rho] + 1
            if rho == BOTTOM:
                new_down[nm] = {BOTTOM}
                new_atoms[nm] = frozenset((nm,))
                continue
            by_atoms = {self.atoms[y]: y for y in self.below(eta)}
            covers = {rho}
            for rho2 in self.down[rho]:
                eta2 = by_atoms[s_atoms | self.atoms[rho2]]
                covers.add(names[(rho2, eta2)])
            new_down[nm] = covers
            new_atoms[nm] = self.atoms[rho] | {vid}
        for x in removed:
            for y in self.down[x]:
                if y not in removed:
                    self.up[y].discard(x)
            del self.rank[x], self.down[x], self.up[x], self.atoms[x]
        for nm in new_rank:
            self.rank[nm] = new_rank[nm]
            self.down[nm] = new_down[nm]
            self.atoms[nm] = new_atoms[nm]
            self.up.setdefault(nm, set())
        for nm, ds in new_down.items():
            for y in ds:
                self.up[y].add(nm)
        return vid

    def poset(self, check=False):
        return SimplicialPoset(self.rank, self.down, check=check)


def stellar_subdivide(P, s, check=True):
    """Stellar subdivision of ``P`` at the simplex ``s``.

    The new vertex is named ``v@s``; new cells are ``rho*v@s``, with a
    ``/eta`` suffix when several cone cells share the base ``rho``.
    """
    if s not in P:
        raise KeyError(f"unknown element {s!r}")
    if s == BOTTOM:
        raise ValueError("cannot subdivide at the minimum")
    ws = _Workspace(P)
    ws.stellar(s)
    return ws.poset(check=check)


def _chain_name(chain):
    return "<".join(chain)


def barycentric_subdivide(P, check=False):
    """Barycentric subdivision as a sequence of stellar subdivisions.

    Original simplices are subdivided in order of descending rank (rank n
    down to rank 2), by id within a rank.  Elements of the result are named
    by the chain of original elements they correspond to, as in
    :func:`order_complex`.
    """
    ws = _Workspace(P)
    origin = {v: v for v in P.vertices()}
    for r in range(P.n, 1, -1):
        for s in sorted(P.of_rank(r)):
            origin[ws.stellar(s)] = s
    names = {BOTTOM: BOTTOM}
    for x in ws.rank:
        if x == BOTTOM:
            continue
        chain = sorted((origin[a] for a in ws.atoms[x]), key=lambda y: (P.rank[y], y))
        names[x] = _chain_name(chain)
    if len(set(names.values())) != len(names):
        raise AssertionError("barycentric subdivision is not a simplicial complex")
    Q = ws.poset().relabel(names)
    if check:
        Q = validate_poset(Q)
    return Q


def order_complex(P):
    """Order complex of P minus its minimum, named by chains ``a<b<c``."""
    chains = {}
    for x in P.proper:
        ext = [(x,)]
        for y in P.below(x):
            if y != x and y != BOTTOM:
                ext.extend(c + (x,) for c in chains[y] if c[-1] == y)
        chains[x] = ext
    rank, down = {}, {}
    for x in P.proper:
        for c in chains[x]:
            nm = _chain_name(c)
            rank[nm] = len(c)
            if len(c) == 1:
                down[nm] = {BOTTOM}
            else:
                down[nm] = {_chain_name(c[:i] + c[i + 1:]) for i in range(len(c))}
    return SimplicialPoset(rank, down, check=False)


# ----- pseudomanifolds -----------------------------------------------

@dataclass(frozen=True)
class PseudomanifoldReport:
    ok: bool
    failed: str = ""  # "purity", "two-covers" or "connectivity"
    witness: object = None

    def __bool__(self):
        return self.ok


def _top_adjacency(P):
    n = P.n
    adj = {t: set() for t in P.of_rank(n)}
    for r in P.of_rank(n - 1):
        tops = sorted(u for u in P.up[r] if P.rank[u] == n)
        for a, b in combinations(tops, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj


def is_pseudomanifold(P):
    n = P.n
    if n == 0:
        return PseudomanifoldReport(False, "purity", BOTTOM)
    for x in P.elements:
        if not any(P.rank[t] == n for t in P.above(x)):
            return PseudomanifoldReport(False, "purity", x)
    for r in P.of_rank(n - 1):
        k = len(P.up[r])
        if k != 2:
            return PseudomanifoldReport(False, "two-covers", (r, k))
    adj = _top_adjacency(P)
    tops = sorted(adj)
    seen = {tops[0]}
    stack = [tops[0]]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(tops):
        return PseudomanifoldReport(False, "connectivity", (sorted(seen), sorted(set(tops) - seen)))
    return PseudomanifoldReport(True)


def _induced_sign(P, top, face):
    # sign of the facet ``face`` in the boundary of ``top`` with atoms sorted
    atoms = sorted(P.atoms(top))
    (missing,) = P.atoms(top) - P.atoms(face)
    return (-1) ** atoms.index(missing)


def orient_pseudomanifold(P):
    """Signs on top simplices making every codimension-one face cancel,
    or ``None`` if the pseudomanifold is not orientable."""
    if not is_pseudomanifold(P):
        raise ValueError("not a pseudomanifold")
    n = P.n
    tops = P.of_rank(n)
    sign = {tops[0]: 1}
    stack = [tops[0]]
    while stack:
        t = stack.pop()
        for r in P.down[t]:
            (u,) = [x for x in P.up[r] if x != t] or [t]
            want = -sign[t] * _induced_sign(P, t, r) * _induced_sign(P, u, r)
            if u in sign:
                if sign[u] != want:
                    return None
            else:
                sign[u] = want
                stack.append(u)
    return sign


# ----- isomorphism ---------------------------------------------------

def _hasse(P, fixed=None):
    G = nx.DiGraph()
    fixed = fixed or {}
    for x in P.elements:
        G.add_node(x, label=(P.rank[x], fixed.get(x)))
    for x, ds in P.down.items():
        for y in ds:
            G.add_edge(y, x)
    return G


def _is_isomorphism(P, Q, m):
    if len(m) != len(P.elements) or set(m.values()) != set(Q.elements):
        return False
    for x in P.elements:
        y = m.get(x)
        if y is None or P.rank[x] != Q.rank[y]:
            return False
        if {m[z] for z in P.down[x]} != set(Q.down[y]):
            return False
    return True


def _refine(P, Q, tags_p, tags_q):
    """Joint colour refinement of two posets by ranks, pins and covers."""
    items = [(0, x) for x in P.elements] + [(1, x) for x in Q.elements]
    down = {(0, x): [(0, y) for y in P.down[x]] for x in P.elements}
    down.update({(1, x): [(1, y) for y in Q.down[x]] for x in Q.elements})
    up = {k: [] for k in items}
    for k, ds in down.items():
        for d in ds:
            up[d].append(k)
    colour = {(0, x): (P.rank[x], tags_p.get(x, -1)) for x in P.elements}
    colour.update({(1, x): (Q.rank[x], tags_q.get(x, -1)) for x in Q.elements})
    classes = len(set(colour.values()))
    while True:
        sig = {k: (colour[k], tuple(sorted(colour[d] for d in down[k])),
                   tuple(sorted(colour[u] for u in up[k]))) for k in items}
        index = {c: i for i, c in enumerate(sorted(set(sig.values())))}
        colour = {k: index[sig[k]] for k in items}
        if len(index) == classes:
            return colour
        classes = len(index)


def poset_isomorphic(P, Q, fixed=None):
    """Cover-preserving, rank-preserving bijection P -> Q.

    ``fixed`` optionally pins some elements: a dict ``{p: q}``.
    Returns ``(True, mapping)`` or ``(False, None)``.
    """
    if fh_vector(P).f != fh_vector(Q).f:
        return False, None
    fixed = dict(fixed or {})
    guess = {x: fixed.get(x, x) for x in P.elements}
    if _is_isomorphism(P, Q, guess):
        return True, guess
    tags_p = {p: i for i, p in enumerate(fixed)}
    tags_q = {q: tags_p[p] for p, q in fixed.items()}
    colour = _refine(P, Q, tags_p, tags_q)
    cp = sorted(c for (side, _), c in colour.items() if side == 0)
    cq = sorted(c for (side, _), c in colour.items() if side == 1)
    if cp != cq:
        return False, None
    GP = _hasse(P, {x: colour[(0, x)] for x in P.elements})
    GQ = _hasse(Q, {x: colour[(1, x)] for x in Q.elements})
    matcher = DiGraphMatcher(GP, GQ, node_match=lambda a, b: a["label"] == b["label"])
    for mapping in matcher.isomorphisms_iter():
        return True, dict(mapping)
    return False, None
