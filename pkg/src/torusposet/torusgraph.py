"""Torus graphs: validation, connection, faces, Thom classes and the
equivariant cohomology ring, orientations, and the passage between torus
graphs and pseudomanifolds with an lsop.

A directed half of an edge is a pair ``(edge_id, d)`` with ``d = 0`` when
it starts at the first listed end and ``d = 1`` otherwise.
"""
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .errors import ValidationError
from .exactla import dual_basis, elementary_divisors, is_lattice_basis, rank_q
from .facering import chain_monomials, hilbert_function, lsop_check, _as_linear
from .polyring import Poly, congruent_mod_linear, monomials_of_degree, restriction_to_kernel
from .sposet import BOTTOM, SimplicialPoset, h_from_f, is_pseudomanifold, _shift_power

__all__ = [
    "TorusGraph",
    "GraphFace",
    "NonOrientable",
    "validate_graph",
    "infer_connection",
    "face_from_seed",
    "enumerate_faces",
    "face_poset",
    "thom_class",
    "is_cohomology_class",
    "thom_relation_check",
    "graded_cohomology_rank",
    "phi_iso_check",
    "orientation",
    "euler_number",
    "ds_graph_check",
    "graph_from_poset",
    "constant_lsop",
    "graph_isomorphic",
    "load_graph",
    "save_graph",
    "graph_to_dict",
    "dumps_graph",
]


def _rev(h):
    return (h[0], 1 - h[1])


def _multiple_of(diff, a):
    """True iff the vector ``diff`` is an integer multiple of ``a``."""
    k = None
    for x, y in zip(diff, a):
        if y == 0:
            if x:
                return False
        else:
            if x % y:
                return False
            q = x // y
            if k is None:
                k = q
            elif k != q:
                return False
    return True


@dataclass(frozen=True)
class GraphFace:
    vertices: frozenset
    edges: frozenset
    dim: int

    @property
    def key(self):
        return (self.vertices, self.edges)

    def __le__(self, other):
        return self.vertices <= other.vertices and self.edges <= other.edges

    def sort_key(self):
        return (self.dim, sorted(self.edges), sorted(self.vertices))


class TorusGraph:
    """An n-valent graph with axial function and inferred connection."""

    def __init__(self, n, vertices, edges, alpha, meta=None, check=True):
        self.n = int(n)
        self.vertices = tuple(vertices)
        self.edges = dict(edges)  # id -> (first end, second end), insertion ordered
        self.alpha = {h: tuple(int(x) for x in v) for h, v in alpha.items()}
        self.meta = dict(meta or {})
        if check:
            self._validate()

    # ----- halves ----------------------------------------------------
    def source(self, h):
        return self.edges[h[0]][h[1]]

    def target(self, h):
        return self.edges[h[0]][1 - h[1]]

    @cached_property
    def halves_at(self):
        out = {p: [] for p in self.vertices}
        for e, ends in self.edges.items():
            for d in (0, 1):
                if ends[d] in out:
                    out[ends[d]].append((e, d))
        return {p: sorted(hs) for p, hs in out.items()}

    def half_at(self, p, e):
        u, w = self.edges[e]
        return (e, 0) if u == p else (e, 1)

    def poly(self, h):
        return Poly.linear(self.alpha[h])

    # ----- validation ------------------------------------------------
    def _validate(self):
        n = self.n
        if n < 1:
            raise ValidationError("ambient rank n must be positive")
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        if not self.vertices:
            raise ValidationError("graph has no vertices")
        for name in list(vs) + list(self.edges):
            if name == BOTTOM or name.startswith("["):
                raise ValidationError(f"reserved identifier {name!r}", name)
        clash = vs & set(self.edges)
        if clash:
            raise ValidationError(f"ids used both for a vertex and an edge: {sorted(clash)}", sorted(clash)[0])
        for e, (u, w) in self.edges.items():
            if u not in vs or w not in vs:
                raise ValidationError(f"edge {e!r} has an unknown end", e)
            if u == w:
                raise ValidationError(f"edge {e!r} is a loop", e)
            for d in (0, 1):
                if len(self.alpha.get((e, d), ())) != n:
                    raise ValidationError(f"axial value on {e!r} must have length {n}", e)
            a, b = self.alpha[(e, 0)], self.alpha[(e, 1)]
            if a != b and a != tuple(-x for x in b):
                raise ValidationError(f"sign condition fails on edge {e!r}: {list(a)} vs {list(b)}", e)
        for p in self.vertices:
            hs = self.halves_at[p]
            if len(hs) != n:
                raise ValidationError(f"vertex {p!r} has valence {len(hs)}, expected {n}", p)
            if not is_lattice_basis([self.alpha[h] for h in hs]):
                raise ValidationError(f"axial values at {p!r} are not a lattice basis", p)
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            p = queue.popleft()
            for h in self.halves_at[p]:
                q = self.target(h)
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        if len(seen) != len(self.vertices):
            missing = sorted(vs - seen)
            raise ValidationError(f"graph is disconnected; unreachable: {missing}", missing[0])
        self.theta  # infers and checks the connection

    @cached_property
    def theta(self):
        return infer_connection(self)

    # ----- faces -----------------------------------------------------
    @cached_property
    def faces(self):
        return enumerate_faces(self)

    @cached_property
    def _face_lookup(self):
        return {F.key: F for F in self.faces}

    def face_id(self, F):
        if F.dim == self.n:
            return BOTTOM
        if F.dim == 0:
            (p,) = F.vertices
            base = p
        elif F.dim == 1:
            (e,) = F.edges
            base = e
        else:
            base = "[" + ",".join(sorted(F.edges)) + "]"
        return self.meta.get("face_names", {}).get(base, base)

    @cached_property
    def faces_by_id(self):
        return {self.face_id(F): F for F in self.faces}

    def face(self, name):
        """Look a face up by id; ``Gamma`` names the whole graph."""
        if isinstance(name, GraphFace):
            return name
        if name in self.faces_by_id:
            return self.faces_by_id[name]
        if name == "Gamma":
            return self.whole
        plain = {self._plain_id(F): F for F in self.faces}
        if name in plain:
            return plain[name]
        raise ValidationError(f"no face named {name!r}", name)

    def _plain_id(self, F):
        names = self.meta.get("face_names", {})
        x = self.face_id(F)
        inverse = {v: k for k, v in names.items()}
        return inverse.get(x, x)

    @cached_property
    def whole(self):
        return GraphFace(frozenset(self.vertices), frozenset(self.edges), self.n)

    def __repr__(self):
        return f"TorusGraph(n={self.n}, vertices={len(self.vertices)}, edges={len(self.edges)})"


def infer_connection(G):
    """theta[h][h'] for every half h and h' at its source."""
    theta = {}
    for e in G.edges:
        for d in (0, 1):
            h = (e, d)
            p, q = G.source(h), G.target(h)
            a = G.alpha[h]
            m = {h: _rev(h)}
            for h1 in G.halves_at[p]:
                if h1 == h:
                    continue
                cands = [
                    h2 for h2 in G.halves_at[q]
                    if h2 != _rev(h)
                    and _multiple_of([x - y for x, y in zip(G.alpha[h2], G.alpha[h1])], a)
                ]
                if len(cands) != 1:
                    what = "no" if not cands else "several"
                    raise ValidationError(
                        f"congruence condition fails along {e!r} from {p!r}: "
                        f"{what} edge at {q!r} matches {h1[0]!r} modulo {list(a)}", e)
                m[h1] = cands[0]
            if len(set(m.values())) != len(m):
                raise ValidationError(f"connection along {e!r} is not a bijection", e)
            theta[h] = m
    for h, m in theta.items():
        back = theta[_rev(h)]
        for x, y in m.items():
            if back[y] != x:
                raise ValidationError(f"connection along {h[0]!r} is not inverse-compatible", h[0])
    return theta


def _graph_from_dict(raw):
    try:
        n = int(raw["n"])
        vertices = [str(v) for v in raw["vertices"]]
        edges, alpha = {}, {}
        for el in raw["edges"]:
            e = str(el["id"])
            if e in edges:
                raise ValidationError(f"duplicate edge id {e!r}", e)
            u, w = (str(x) for x in el["ends"])
            edges[e] = (u, w)
            alpha[(e, 0)] = tuple(int(x) for x in el["alpha_from_first"])
            alpha[(e, 1)] = tuple(int(x) for x in el["alpha_from_second"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed graph description: {exc}") from exc
    meta = {k: v for k, v in raw.items() if k not in ("n", "vertices", "edges")}
    return n, vertices, edges, alpha, meta


def validate_graph(raw):
    if isinstance(raw, TorusGraph):
        return TorusGraph(raw.n, raw.vertices, raw.edges, raw.alpha, raw.meta)
    return TorusGraph(*_graph_from_dict(raw))


def graph_to_dict(G):
    out = {
        "n": str(G.n),
        "vertices": list(G.vertices),
        "edges": [
            {
                "id": e,
                "ends": [u, w],
                "alpha_from_first": [str(x) for x in G.alpha[(e, 0)]],
                "alpha_from_second": [str(x) for x in G.alpha[(e, 1)]],
            }
            for e, (u, w) in G.edges.items()
        ],
    }
    out.update(G.meta)
    return out


def dumps_graph(G):
    return json.dumps(graph_to_dict(G), indent=2, ensure_ascii=False) + "\n"


def save_graph(G, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_graph(G))


def load_graph(path):
    with open(path, encoding="utf-8") as fh:
        return validate_graph(json.load(fh))


# ----- faces ---------------------------------------------------------

def face_from_seed(G, p, seed):
    """The unique face through ``p`` spanned by the edges ``seed`` at p."""
    at_p = {h[0]: h for h in G.halves_at[p]}
    seed = frozenset(seed)
    if not seed <= set(at_p):
        raise ValidationError(f"seed edges {sorted(seed - set(at_p))} are not at {p!r}", p)
    local = {p: frozenset(at_p[e] for e in seed)}
    queue = deque([p])
    while queue:
        u = queue.popleft()
        for h in local[u]:
            q = G.target(h)
            moved = frozenset(G.theta[h][x] for x in local[u])
            if q in local:
                if local[q] != moved:
                    raise ValidationError(f"face transport is inconsistent at {q!r}", q)
            else:
                local[q] = moved
                queue.append(q)
    edges = frozenset(h[0] for hs in local.values() for h in hs)
    return GraphFace(frozenset(local), edges, len(seed))


def enumerate_faces(G):
    found = {}
    for p in G.vertices:
        es = [h[0] for h in G.halves_at[p]]
        for k in range(G.n + 1):
            for S in combinations(es, k):
                F = face_from_seed(G, p, S)
                found.setdefault(F.key, F)
    return tuple(sorted(found.values(), key=GraphFace.sort_key))


def face_poset(G):
    """Faces under reverse inclusion; the whole graph is the minimum."""
    ids = {F.key: G.face_id(F) for F in G.faces}
    if len(set(ids.values())) != len(ids):
        raise ValidationError("face names are not unique")
    by_dim = {}
    for F in G.faces:
        by_dim.setdefault(F.dim, []).append(F)
    rank, down = {}, {}
    for F in G.faces:
        if F.dim == G.n:
            continue
        x = ids[F.key]
        rank[x] = G.n - F.dim
        down[x] = {ids[H.key] for H in by_dim.get(F.dim + 1, []) if F <= H}
    return SimplicialPoset(rank, down)


# ----- Thom classes and cohomology ----------------------------------

def thom_class(G, F):
    F = G.face(F)
    out = {}
    for p in G.vertices:
        if p not in F.vertices:
            out[p] = Poly.zero(G.n)
            continue
        val = Poly.constant(G.n, 1)
        for h in G.halves_at[p]:
            if h[0] not in F.edges:
                val = val * G.poly(h)
        out[p] = val
    return out


def is_cohomology_class(G, f):
    """Return ``(ok, failing edge or None)``."""
    for e, (u, w) in G.edges.items():
        if not congruent_mod_linear(f[u], f[w], G.alpha[(e, 0)]):
            return False, e
    return True, None


def _product(G, f, g):
    return {p: f[p] * g[p] for p in G.vertices}


def _sum(G, classes):
    out = {p: Poly.zero(G.n) for p in G.vertices}
    for f in classes:
        out = {p: out[p] + f[p] for p in G.vertices}
    return out


def _components(G, vertices, edges):
    rest = set(vertices)
    comps = []
    while rest:
        start = min(rest)
        comp, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for h in G.halves_at[u]:
                if h[0] in edges:
                    q = G.target(h)
                    if q not in comp:
                        comp.add(q)
                        stack.append(q)
        rest -= comp
        comps.append((frozenset(comp), frozenset(e for e in edges if G.edges[e][0] in comp)))
    return comps


def thom_relation_sides(G, F1, F2):
    """Both sides of tau_F1 * tau_F2 = tau_{F1 v F2} * sum over components
    E of F1 n F2 of tau_E."""
    F1, F2 = G.face(F1), G.face(F2)
    lhs = _product(G, thom_class(G, F1), thom_class(G, F2))
    common_v = F1.vertices & F2.vertices
    if not common_v:
        return lhs, {p: Poly.zero(G.n) for p in G.vertices}
    common_e = F1.edges & F2.edges
    parts = []
    for key in _components(G, common_v, common_e):
        if key not in G._face_lookup:
            raise ValidationError("intersection component is not a face", sorted(key[0]))
        parts.append(thom_class(G, G._face_lookup[key]))
    uppers = [H for H in G.faces if F1 <= H and F2 <= H]
    minimal = [H for H in uppers if not any(K != H and K <= H for K in uppers)]
    if len(minimal) != 1:
        raise AssertionError("ambiguous join of faces with nonempty intersection")
    rhs = _product(G, thom_class(G, minimal[0]), _sum(G, parts))
    return lhs, rhs


def thom_relation_check(G, F1, F2):
    lhs, rhs = thom_relation_sides(G, F1, F2)
    return all(lhs[p] == rhs[p] for p in G.vertices)


def _restriction_matrix(G, h, d):
    """Matrix of f -> f mod alpha(h) on monomials of degree d (columns)."""
    mons = monomials_of_degree(G.n, d)
    images = [restriction_to_kernel(Poly(G.n, {m: 1}), G.alpha[h]) for m in mons]
    out_mons = sorted({e for im in images for e in im.terms})
    idx = {e: i for i, e in enumerate(out_mons)}
    M = [[0] * len(mons) for _ in out_mons]
    for j, im in enumerate(images):
        for e, c in im.terms.items():
            M[idx[e]][j] = c
    return M


def _congruence_system(G, d):
    mons = monomials_of_degree(G.n, d)
    m = len(mons)
    vidx = {p: i for i, p in enumerate(G.vertices)}
    rows = []
    for e, (u, w) in G.edges.items():
        R = _restriction_matrix(G, (e, 0), d)
        for r in R:
            row = {}
            for j, c in enumerate(r):
                if c:
                    row[vidx[u] * m + j] = c
                    row[vidx[w] * m + j] = row.get(vidx[w] * m + j, 0) - c
            row = {k: c for k, c in row.items() if c}
            if row:
                rows.append(row)
    return rows, mons, len(G.vertices) * m


def graded_cohomology_rank(G, d):
    """Rank of the degree-d part (cohomological degree 2d) of H*_T(G)."""
    rows, _, N = _congruence_system(G, d)
    return N - (rank_q(rows) if rows else 0)


def _class_vector(G, f, mons):
    vec = []
    for p in G.vertices:
        vec.extend(f[p].coefficient(m) for m in mons)
    return vec


def phi_iso_check(G, d, report=False):
    """Compare the degree-d part of H*_T(G) with the face ring.

    Checks that the ranks agree with the Hilbert function of the face poset
    and that the Thom-class images of the chain monomials lie in the
    congruence lattice and span it (nonzero elementary divisors all 1).
    """
    P = face_poset(G)
    rows, mons, N = _congruence_system(G, d)
    kernel_rank = N - (rank_q(rows) if rows else 0)
    hf = hilbert_function(P, d)
    thoms = {}
    images = []
    for mono in chain_monomials(P, d):
        f = {p: Poly.constant(G.n, 1) for p in G.vertices}
        for x, a in mono:
            if x not in thoms:
                thoms[x] = thom_class(G, G.faces_by_id[x])
            for _ in range(a):
                f = _product(G, f, thoms[x])
        images.append(_class_vector(G, f, mons))
    in_lattice = all(
        sum(c * y[k] for k, c in row.items()) == 0 for row in rows for y in images
    )
    divs = elementary_divisors(images) if images else []
    span_ok = len(divs) == kernel_rank and all(x == 1 for x in divs)
    ok = kernel_rank == hf and in_lattice and span_ok
    if report:
        return ok, {"rank": kernel_rank, "hilbert": hf, "in_lattice": in_lattice, "saturated_span": span_ok}
    return ok


# ----- orientation, Euler numbers, Dehn-Sommerville -----------------

@dataclass(frozen=True)
class NonOrientable:
    cycle: tuple  # edge ids forming an inconsistent cycle

    def __bool__(self):
        return False


def orientation(G):
    """A map vertex -> +-1, or :class:`NonOrientable` with a witness cycle."""
    root = G.vertices[0]
    o = {root: 1}
    parent = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for h in G.halves_at[u]:
            w = G.target(h)
            a, b = G.alpha[h], G.alpha[_rev(h)]
            want = o[u] if b == tuple(-x for x in a) else -o[u]
            if w not in o:
                o[w] = want
                parent[w] = (u, h[0])
                queue.append(w)
            elif o[w] != want:
                return NonOrientable(_cycle(parent, u, w, h[0]))
    return o


def _cycle(parent, u, w, e):
    def path(x):
        out = []
        while parent[x] is not None:
            y, edge = parent[x]
            out.append((x, edge))
            x = y
        return out, x

    pu, _ = path(u)
    pw, _ = path(w)
    eu = [edge for _, edge in pu]
    ew = [edge for _, edge in pw]
    while eu and ew and eu[-1] == ew[-1]:
        eu.pop()
        ew.pop()
    return tuple(eu + [e] + ew[::-1])


def euler_number(G, F):
    F = G.face(F)
    return sum((-1) ** H.dim for H in G.faces if H <= F)


def ds_graph_check(G):
    """Both sides of the Dehn-Sommerville identity for a torus graph.

    lhs comes from the h-vector of the face poset, rhs from Euler numbers
    of faces: sum over F of (1 - chi(F)) (t - 1)^dim F.
    """
    n = G.n
    f = [0] * (n + 1)
    for F in G.faces:
        f[n - F.dim] += 1
    h = h_from_f(f)
    lhs = [h[n - i] - h[i] for i in range(n + 1)]
    rhs = [0] * (n + 1)
    for F in G.faces:
        c = 1 - euler_number(G, F)
        if c:
            for j, a in enumerate(_shift_power(F.dim)):
                rhs[j] += c * a
    return tuple(lhs), tuple(rhs), lhs == rhs


# ----- pseudomanifolds and graphs -------------------------------------

def _lambda_vectors(P, thetas):
    lin = [_as_linear(P, th) for th in thetas]
    return {v: tuple(th.get(v, 0) for th in lin) for v in P.vertices()}


def graph_from_poset(P, thetas):
    """Torus graph of a pseudomanifold with an integral lsop.

    Vertices are the top simplices, edges the codimension-one simplices.
    At a top simplex p the axial values are the dual basis of the lambda
    vectors of its vertices; the half along a codimension-one face is
    labelled by the dual of the vertex it misses.
    """
    pm = is_pseudomanifold(P)
    if not pm:
        raise ValidationError(f"not a pseudomanifold ({pm.failed})", pm.witness)
    ok, bad = lsop_check(P, thetas, "z")
    if not ok:
        raise ValidationError(f"not an integral lsop: fails at {bad!r}", bad)
    n = P.n
    lam = _lambda_vectors(P, thetas)
    tops = P.of_rank(n)
    duals = {}
    for p in tops:
        atoms = sorted(P.atoms(p))
        duals[p] = dict(zip(atoms, dual_basis([lam[v] for v in atoms])))
    edges, alpha = {}, {}
    for rho in P.of_rank(n - 1):
        u, w = sorted(P.up[rho])
        edges[rho] = (u, w)
        for d, p in enumerate((u, w)):
            (missing,) = P.atoms(p) - P.atoms(rho)
            alpha[(rho, d)] = tuple(duals[p][missing])
    return TorusGraph(n, tops, edges, alpha)


def constant_lsop(G):
    """The lsop theta_j = sum over facets F of lambda_F(t_j) v_F.

    At a vertex p the lambda vectors of the facets through p are the dual
    basis of the axial values of the edges leaving those facets.
    """
    P = face_poset(G)
    facets = {x: G.faces_by_id[x] for x in P.vertices()}
    lam = {}
    for p in G.vertices:
        through = [(x, F) for x, F in facets.items() if p in F.vertices]
        outside = []
        for x, F in through:
            (h,) = [h for h in G.halves_at[p] if h[0] not in F.edges]
            outside.append(G.alpha[h])
        for (x, _), vec in zip(through, dual_basis(outside)):
            vec = tuple(vec)
            if lam.setdefault(x, vec) != vec:
                raise ValidationError(f"facet {x!r} gets inconsistent lambda values", x)
    return [{x: lam[x][j] for x in sorted(lam) if lam[x][j]} for j in range(G.n)]


# ----- isomorphism -----------------------------------------------------

def _pair_profile(G):
    # (u, w) -> sorted list of (alpha from u, alpha from w) over edges u-w
    prof = {}
    for e, (u, w) in G.edges.items():
        a, b = G.alpha[(e, 0)], G.alpha[(e, 1)]
        prof.setdefault((u, w), []).append((a, b))
        prof.setdefault((w, u), []).append((b, a))
    return {k: sorted(v) for k, v in prof.items()}


def graph_isomorphic(G, H, match_alpha=True):
    """Vertex bijection carrying edges (and axial values) of G onto H.

    Returns ``(True, vertex_map, edge_map)`` or ``(False, None, None)``.
    """
    if G.n != H.n or len(G.vertices) != len(H.vertices) or len(G.edges) != len(H.edges):
        return False, None, None
    pg, ph = _pair_profile(G), _pair_profile(H)
    if not match_alpha:
        pg = {k: len(v) for k, v in pg.items()}
        ph = {k: len(v) for k, v in ph.items()}

    def local(prof, p):
        return sorted(repr(v) for (a, _), v in prof.items() if a == p)

    sig_g = {p: local(pg, p) for p in G.vertices}
    sig_h = {q: local(ph, q) for q in H.vertices}
    order = []
    seen = set()
    for start in G.vertices:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            order.append(u)
            for h in G.halves_at[u]:
                w = G.target(h)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    mapping, used = {}, set()

    def extend(i):
        if i == len(order):
            return True
        u = order[i]
        for q in H.vertices:
            if q in used or sig_g[u] != sig_h[q]:
                continue
            if all(pg.get((u, x)) == ph.get((q, mapping[x])) for x in mapping):
                mapping[u] = q
                used.add(q)
                if extend(i + 1):
                    return True
                del mapping[u]
                used.discard(q)
        return False

    if not extend(0):
        return False, None, None
    edge_map = {}
    pool = {}
    for e, (u, w) in H.edges.items():
        pool.setdefault((u, w), []).append(e)
    for e, (u, w) in G.edges.items():
        a, b = G.alpha[(e, 0)], G.alpha[(e, 1)]
        x, y = mapping[u], mapping[w]
        cands = [(f, False) for f in pool.get((x, y), [])] + [(f, True) for f in pool.get((y, x), [])]
        for f, flipped in cands:
            fa, fb = H.alpha[(f, 0)], H.alpha[(f, 1)]
            if flipped:
                fa, fb = fb, fa
            if not match_alpha or (fa, fb) == (a, b):
                edge_map[e] = f
                key = (x, y) if not flipped else (y, x)
                pool[key].remove(f)
                break
    return True, mapping, edge_map
