"""Standard and random simplicial posets, used by tests and benchmarks."""
import random
from itertools import combinations

from .facering import lsop_check
from .sposet import SimplicialPoset, poset_from_facets, stellar_subdivide


def simplex(n):
    """The full simplex with n vertices (rank n)."""
    return poset_from_facets([tuple(f"v{i}" for i in range(n))])


def simplex_boundary(n):
    """Boundary of the simplex with n + 1 vertices (rank n)."""
    vs = [f"v{i}" for i in range(n + 1)]
    return poset_from_facets(list(combinations(vs, n)))


def octahedron_boundary(n):
    """Boundary of the n-dimensional cross-polytope (rank n)."""
    facets = []
    for signs in range(2 ** n):
        facets.append(tuple(f"{'+' if signs >> i & 1 else '-'}{i}" for i in range(n)))
    return poset_from_facets(facets)


def twin_top(P, s, name=None):
    """Add a second top element with the same boundary as ``s``.

    Gluing a cell along the boundary of an existing one gives a simplicial
    poset that is not a complex (two triangles glued along the boundary).
    """
    name = name or f"{s}'"
    while name in P:
        name += "'"
    rank = dict(P.rank)
    down = {x: set(ds) for x, ds in P.down.items()}
    rank[name] = P.rank[s]
    down[name] = set(P.down[s])
    return SimplicialPoset(rank, down)


def random_complex(rng, n_vertices, rank, n_facets):
    vs = [f"u{i}" for i in range(n_vertices)]
    facets = {tuple(sorted(rng.sample(vs, rank))) for _ in range(n_facets)}
    return poset_from_facets(sorted(facets))


def random_stellar(rng, P, steps):
    for _ in range(steps):
        P = stellar_subdivide(P, rng.choice(P.proper), check=False)
    return P


def random_poset(rng, max_rank=4):
    """A random valid simplicial poset of rank <= max_rank."""
    r = rng.randint(1, max_rank)
    kind = rng.randrange(4)
    if kind == 0:
        P = random_complex(rng, rng.randint(r, r + 4), r, rng.randint(1, 6))
    elif kind == 1:
        P = simplex_boundary(r) if r > 1 else simplex(1)
    elif kind == 2:
        P = simplex(r)
    else:
        P = octahedron_boundary(r)
    for _ in range(rng.randint(0, 2)):
        top = [x for x in P.proper if P.rank[x] >= 2]
        if top:
            P = twin_top(P, rng.choice(top))
    return random_stellar(rng, P, rng.randint(0, 3))


def rp2_six_vertex():
    """The 6-vertex triangulation of the real projective plane."""
    return poset_from_facets([(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
                              (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)])


def cm_seeds():
    """Posets that are Cohen-Macaulay over the rationals."""
    return [simplex_boundary(2), simplex_boundary(3), simplex(3), octahedron_boundary(3),
            rp2_six_vertex(), twin_top(simplex(3), "v0,v1,v2"), simplex_boundary(4)]


def find_lsop(rng, P, coeffs="q", tries=200, bound=3):
    """Random small-integer linear elements until they form an lsop."""
    verts = P.vertices()
    for _ in range(tries):
        thetas = [{v: rng.randint(-bound, bound) for v in verts} for _ in range(P.n)]
        if lsop_check(P, thetas, coeffs)[0]:
            return thetas
    return None


def rng_for(seed):
    return random.Random(seed)
