"""Blowing up a torus graph at a face, the blow-down map and its pullback.

At a vertex p of the face F the normal edges are numbered 1..n-k by the
facets containing F, sorted by face id: the j-th normal edge is the unique
edge at p leaving the j-th facet.  The vertex p is replaced by ``p~1``,
..., ``p~(n-k)``.  New edges:

* ``p~i-j`` joins p~i and p~j (i < j), with axial value alpha(p n_j) -
  alpha(p n_i) from p~i, and the negative from p~j;
* ``e~j`` joins p~j and q~j for every edge e = pq of F, keeping alpha(e);
* a normal edge keeps its id and values, and now starts at p~j;
* edges away from F are unchanged.
"""
from dataclasses import dataclass, field

from .errors import ValidationError
from .facering import beta_map, chain_monomials, RingElement
from .polyring import Poly
from .sposet import BOTTOM, is_simplicial_complex, poset_isomorphic, star, stellar_subdivide
from .torusgraph import (
    GraphFace,
    TorusGraph,
    face_from_seed,
    face_poset,
    is_cohomology_class,
    thom_class,
)

__all__ = [
    "BlowDownMap",
    "blow_up",
    "pullback",
    "verify_thom_pullback",
    "stellar_correspondence",
    "thom_image",
]


@dataclass
class BlowDownMap:
    vertex_map: dict  # new vertex -> old vertex
    face: GraphFace  # the face that was blown up (in the old graph)
    exceptional: GraphFace  # its replacement facet (in the new graph)
    normals: dict = field(default_factory=dict)  # p in F -> [normal edge ids], by facet index
    source: TorusGraph = None
    target: TorusGraph = None

    def strict_transform(self, H):
        """The face of the blown-up graph lying over a face H not inside F."""
        G, Gt, F = self.source, self.target, self.face
        H = G.face(H)
        if H <= F and F != H:
            raise ValidationError("faces inside the blown-up face have no strict transform")
        if F == H and not self.normals:
            return H
        for v in Gt.vertices:
            p = self.vertex_map[v]
            if p not in H.vertices:
                continue
            if p in F.vertices and self.normals:
                j = int(v.rsplit("~", 1)[1])
                if self.normals[p][j - 1] not in H.edges:
                    continue
            seed = [h[0] for h in Gt.halves_at[v] if self._edge_in(h[0], H)]
            T = face_from_seed(Gt, v, seed)
            if T.dim != H.dim or {self.vertex_map[x] for x in T.vertices} != set(H.vertices):
                raise AssertionError(f"strict transform of {sorted(H.edges)} is inconsistent")
            return T
        raise AssertionError("face has no vertex over it")

    def _edge_in(self, e, H):
        if e in self.source.edges:  # kept, possibly re-attached at a new vertex
            return e in H.edges
        base, _, tail = e.rpartition("~")
        if "-" in tail:  # p~i-j
            i, j = (int(x) for x in tail.split("-"))
            return self.normals[base][i - 1] in H.edges and self.normals[base][j - 1] in H.edges
        return base in H.edges  # e~j


def _normals(G, F):
    facets = sorted(
        (H for H in G.faces if H.dim == G.n - 1 and F <= H), key=lambda H: G.face_id(H)
    )
    if len(facets) != G.n - F.dim:
        raise ValidationError(
            f"face lies in {len(facets)} facets, expected {G.n - F.dim}", G.face_id(F))
    out = {}
    for p in sorted(F.vertices):
        row = []
        for H in facets:
            outside = [h[0] for h in G.halves_at[p] if h[0] not in H.edges]
            if len(outside) != 1 or outside[0] in F.edges:
                raise ValidationError(f"facet labelling of normals fails at {p!r}", p)
            row.append(outside[0])
        if len(set(row)) != len(row):
            raise ValidationError(f"normal directions at {p!r} are not distinct", p)
        out[p] = row
    return out


def blow_up(G, F):
    """Return ``(blown-up graph, blow-down map)``."""
    F = G.face(F)
    n, k = G.n, F.dim
    if k == n:
        raise ValidationError("cannot blow up the whole graph")
    if k == n - 1:
        b = BlowDownMap({v: v for v in G.vertices}, F, F, {}, G, G)
        return G, b
    normals = _normals(G, F)
    m = n - k

    def new(p, j):
        return f"{p}~{j}"

    vertices = []
    vmap = {}
    for p in G.vertices:
        if p in F.vertices:
            for j in range(1, m + 1):
                vertices.append(new(p, j))
                vmap[new(p, j)] = p
        else:
            vertices.append(p)
            vmap[p] = p
    edges, alpha = {}, {}

    def add(e, u, w, a, b):
        if e in edges:
            raise ValidationError(f"edge id {e!r} collides after blow-up", e)
        edges[e] = (u, w)
        alpha[(e, 0)], alpha[(e, 1)] = tuple(a), tuple(b)

    index = {p: {e: j + 1 for j, e in enumerate(row)} for p, row in normals.items()}
    for e, (u, w) in G.edges.items():
        a, b = G.alpha[(e, 0)], G.alpha[(e, 1)]
        if e in F.edges:
            for j in range(1, m + 1):
                add(f"{e}~{j}", new(u, j), new(w, j), a, b)
            continue
        uu = new(u, index[u][e]) if u in F.vertices else u
        ww = new(w, index[w][e]) if w in F.vertices else w
        add(e, uu, ww, a, b)
    for p in sorted(F.vertices):
        out = {e: G.alpha[G.half_at(p, e)] for e in normals[p]}
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                ai, aj = out[normals[p][i - 1]], out[normals[p][j - 1]]
                fwd = [y - x for x, y in zip(ai, aj)]
                add(f"{p}~{i}-{j}", new(p, i), new(p, j), fwd, [-x for x in fwd])
    clash = set(vertices) & set(edges)
    if clash:
        raise ValidationError(f"identifier collision after blow-up: {sorted(clash)}", sorted(clash)[0])
    Gt = TorusGraph(n, vertices, edges, alpha)
    exc_v = frozenset(v for v in vertices if vmap[v] in F.vertices)
    exc_e = frozenset(e for e, (u, w) in edges.items() if u in exc_v and w in exc_v and e not in G.edges)
    exceptional = GraphFace(exc_v, exc_e, n - 1)
    if exceptional.key not in Gt._face_lookup:
        raise AssertionError("exceptional set is not a facet")
    b = BlowDownMap(vmap, F, Gt._face_lookup[exceptional.key], normals, G, Gt)
    return Gt, b


def pullback(G, Gt, b, f):
    ok, bad = is_cohomology_class(G, f)
    if not ok:
        raise ValidationError(f"not a cohomology class: fails on edge {bad!r}", bad)
    return {v: f[b.vertex_map[v]] for v in Gt.vertices}


def verify_thom_pullback(G, F, detail=False):
    """Check b* tau_H = tau_H~ (+ tau_F~ when F lies in H) for every facet H."""
    F = G.face(F)
    Gt, b = blow_up(G, F)
    results = {}
    for H in G.faces:
        if H.dim != G.n - 1:
            continue
        pulled = pullback(G, Gt, b, thom_class(G, H))
        if b.normals and F <= H:
            expect = thom_class(Gt, b.strict_transform(H))
            extra = thom_class(Gt, b.exceptional)
            expect = {v: expect[v] + extra[v] for v in Gt.vertices}
        else:
            expect = thom_class(Gt, b.strict_transform(H))
        results[G.face_id(H)] = all(pulled[v] == expect[v] for v in Gt.vertices)
    ok = all(results.values())
    return (ok, results) if detail else ok


def thom_image(G, x, names=None):
    """Image of a face-ring element of face_poset(G) under v_H -> tau_H."""
    names = names or {}
    out = {p: Poly.zero(G.n) for p in G.vertices}
    cache = {}
    for mono, c in x.terms.items():
        val = {p: Poly.constant(G.n, c) for p in G.vertices}
        for y, a in mono:
            y = names.get(y, y)
            if y not in cache:
                cache[y] = thom_class(G, G.faces_by_id[y])
            for _ in range(a):
                val = {p: val[p] * cache[y][p] for p in G.vertices}
        out = {p: out[p] + val[p] for p in G.vertices}
    return out


def stellar_correspondence(G, F, detail=False):
    """Compare the blow-up with the stellar subdivision of the face poset.

    The face poset of the blow-up must be isomorphic to the subdivision, by
    an isomorphism sending each surviving element to its strict transform
    and the new vertex to the exceptional facet.  When the star of F is a
    simplicial complex, also checks that the beta map followed by Thom
    classes agrees with the pullback on chain monomials of degree <= n.
    """
    F = G.face(F)
    P = face_poset(G)
    s = G.face_id(F)
    Gt, b = blow_up(G, F)
    Pt = face_poset(Gt)
    info = {"isomorphic": False, "beta_checked": False, "beta_agrees": None}
    if F.dim == G.n - 1:
        Q = stellar_subdivide(P, s)
        ok, mapping = poset_isomorphic(Q, Pt)
        info["isomorphic"] = ok
        return (ok, info) if detail else ok
    Q = stellar_subdivide(P, s)
    fixed = {f"v@{s}": Gt.face_id(b.exceptional)}
    for x in Q.proper:
        if x in P and x != BOTTOM:
            fixed[x] = Gt.face_id(b.strict_transform(G.faces_by_id[x]))
    ok, mapping = poset_isomorphic(Q, Pt, fixed)
    info["isomorphic"] = ok
    if not ok:
        return (False, info) if detail else False
    if is_simplicial_complex(star(P, s)):
        info["beta_checked"] = True
        agree = True
        for d in range(G.n + 1):
            for mono in chain_monomials(P, d):
                x = RingElement(P, {mono: 1})
                lhs = thom_image(Gt, beta_map(P, s, x, Q), mapping)
                rhs = pullback(G, Gt, b, thom_image(G, x))
                if any(lhs[v] != rhs[v] for v in Gt.vertices):
                    agree = False
                    info.setdefault("beta_failures", []).append(mono)
        info["beta_agrees"] = agree
        ok = ok and agree
    return (ok, info) if detail else ok
