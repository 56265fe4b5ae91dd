import json
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from torusposet.errors import ValidationError
from torusposet.generators import random_poset, rng_for, simplex, simplex_boundary, twin_top
from torusposet.polyring import Poly
from torusposet.sposet import (
    BOTTOM,
    SimplicialPoset,
    barycentric_subdivide,
    chi_upper,
    dehn_sommerville,
    dumps_poset,
    fh_vector,
    is_pseudomanifold,
    is_simplicial_complex,
    link,
    load_poset,
    meets_joins,
    order_complex,
    orient_pseudomanifold,
    poset_from_facets,
    poset_isomorphic,
    save_poset,
    star,
    stellar_subdivide,
    validate_poset,
)

seeds = st.integers(0, 10 ** 6)


def h_by_expansion(f):
    # sum_i h_i t^(n-i) = sum_i f_(i-1) (t-1)^(n-i), expanded with Poly
    n = len(f) - 1
    t = Poly.var(1, 0)
    total = Poly.zero(1)
    for i in range(n + 1):
        total = total + f[i] * (t - 1) ** (n - i)
    return tuple(total.coefficient((n - i,)) for i in range(n + 1))


def count_chains(P):
    # f-vector of the order complex by brute force over subsets
    elems = list(P.proper)
    f = [1]
    for k in range(1, P.n + 1):
        f.append(sum(1 for c in combinations(elems, k)
                     if all(P.leq(a, b) or P.leq(b, a) for a, b in combinations(c, 2))))
    return tuple(f)


# ----- validation -------------------------------------------------------

def test_triangle_boundary_is_a_complex():
    P = simplex_boundary(2)
    assert P.n == 2 and is_simplicial_complex(P)


def test_two_triangles_valid_not_complex(posets):
    P = posets["two-triangles"]
    assert P.n == 3 and not is_simplicial_complex(P)


def test_rank_two_with_one_atom_rejected():
    with pytest.raises(ValidationError) as exc:
        SimplicialPoset({"a": 1, "x": 2}, {"a": {BOTTOM}, "x": {"a"}})
    assert exc.value.witness == "x"


def test_file_errors():
    with pytest.raises(ValidationError):
        validate_poset({"rank_max": 1, "elements": [{"id": BOTTOM, "rank": 1, "covers": []}]})
    with pytest.raises(ValidationError):
        validate_poset({"rank_max": 2, "elements": [{"id": "a", "rank": 1, "covers": []},
                                                    {"id": "x", "rank": 2, "covers": ["a", "b"]}]})
    with pytest.raises(ValidationError):
        validate_poset({"elements": "nope"})


def test_round_trip_bytes(posets, tmp_path):
    for name, P in posets.items():
        path = tmp_path / f"{name}.json"
        save_poset(P, path)
        Q = load_poset(path)
        assert dumps_poset(Q) == path.read_text()
        assert Q.rank == P.rank and Q.down == P.down
        assert json.loads(dumps_poset(Q)) == json.loads(dumps_poset(P))


# ----- meets and joins --------------------------------------------------

def test_meets_joins_examples(graphs):
    from torusposet.torusgraph import face_poset
    P = face_poset(graphs["fig1a"])
    assert meets_joins(P, "e", "g") == ({BOTTOM}, {"p", "q"})
    assert meets_joins(P, "p", "q")[1] == frozenset()
    assert meets_joins(P, BOTTOM, "e") == ({BOTTOM}, {"e"})


def test_complex_examples(tetra_boundary, posets):
    assert is_simplicial_complex(tetra_boundary)
    assert not is_simplicial_complex(posets["rp2-3vertex"])
    assert is_simplicial_complex(posets["rp2-6vertex"])


# ----- f, h, chi, Dehn-Sommerville --------------------------------------

def test_fh_examples(posets, tetra_boundary):
    for P, f, h in ((posets["two-triangles"], (1, 3, 3, 2), (1, 0, 0, 1)),
                    (tetra_boundary, (1, 4, 6, 4), (1, 1, 1, 1)),
                    (posets["rp2-6vertex"], (1, 6, 15, 10), (1, 3, 6, 0))):
        fh = fh_vector(P)
        assert (fh.f, fh.h) == (f, h)


def test_chi_upper_examples(posets, tetra_boundary):
    P = posets["two-triangles"]
    assert chi_upper(P, "T1") == 1
    assert chi_upper(P, BOTTOM) == sum((-1) ** (P.rank[x] - 1) for x in P.elements) == 1
    v = tetra_boundary.vertices()[0]
    assert chi_upper(tetra_boundary, v) == 1 - 3 + 3 == 1


def test_ds_examples(posets, tetra_boundary):
    for P in (posets["two-triangles"], tetra_boundary):
        r = dehn_sommerville(P)
        assert r.equal and set(r.lhs) == {0}
    r = dehn_sommerville(posets["rp2-6vertex"])
    assert r.equal and r.defect == (-1, 3, -3, 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_random_posets_valid_and_ds(seed):
    P = random_poset(rng_for(seed))
    validate_poset(P)
    fh = fh_vector(P)
    assert fh.h == h_by_expansion(fh.f)
    r = dehn_sommerville(P)
    assert r.lhs == r.rhs and all(isinstance(x, int) for x in r.rhs)


# ----- stars, links, subdivisions ---------------------------------------

def test_star_examples(posets, tetra_boundary):
    P = posets["two-triangles"]
    assert set(star(P, "T1").elements) == P.below("T1")
    assert set(star(P, "ab").elements) == set(P.elements)
    assert set(link(P, "ab").proper) == {"c"}
    K = tetra_boundary
    for s in K.proper:
        assert len(star(K, s)) == len(K.below(s)) * len(link(K, s))


def test_stellar_examples(tetra_boundary, posets):
    tri = simplex(3)
    assert fh_vector(stellar_subdivide(tri, "v0,v1,v2")).f == (1, 4, 6, 3)
    top = tetra_boundary.of_rank(3)[0]
    assert fh_vector(stellar_subdivide(tetra_boundary, top)).f == (1, 5, 9, 6)
    Q = stellar_subdivide(posets["two-triangles"], "T1")
    assert fh_vector(Q).f == (1, 4, 6, 4)
    validate_poset(Q)
    assert meets_joins(Q, "a", "b")[1] == {"ab"}
    # at an edge whose star is everything: both triangles are split
    assert fh_vector(stellar_subdivide(posets["two-triangles"], "ab")).f == (1, 4, 6, 4)
    with pytest.raises(ValueError):
        stellar_subdivide(tri, BOTTOM)


def test_barycentric_examples(tetra_boundary, posets):
    B = barycentric_subdivide(simplex(2))
    assert fh_vector(B).f == (1, 3, 2)
    B = barycentric_subdivide(posets["two-triangles"])
    assert fh_vector(B).f[1] == 8 and is_simplicial_complex(B)
    assert poset_isomorphic(B, order_complex(posets["two-triangles"]))[0]
    assert fh_vector(barycentric_subdivide(tetra_boundary)).f == (1, 14, 36, 24)


def test_order_complex_examples():
    chain = SimplicialPoset({"a": 1, "b": 2}, {"a": {BOTTOM}, "b": {"a"}}, check=False)
    O = order_complex(chain)
    assert fh_vector(O).f == (1, 2, 1) and "a<b" in O
    two = SimplicialPoset({"a": 1, "b": 1}, {"a": {BOTTOM}, "b": {BOTTOM}})
    assert fh_vector(order_complex(two)).f == (1, 2)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_barycentric_matches_chain_count(seed):
    P = random_poset(rng_for(seed), max_rank=3)
    B = barycentric_subdivide(P, check=True)
    assert fh_vector(B).f == count_chains(P)
    assert poset_isomorphic(B, order_complex(P))[0]


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_stellar_preserves_euler_characteristic(seed):
    rng = rng_for(seed)
    P = random_poset(rng)
    s = rng.choice(P.proper)
    Q = stellar_subdivide(P, s)
    chi = lambda X: sum((-1) ** (i - 1) * x for i, x in enumerate(fh_vector(X).f) if i)
    assert chi(P) == chi(Q)
    assert f"v@{s}" in Q and Q.rank[f"v@{s}"] == 1


# ----- pseudomanifolds, isomorphism -------------------------------------

def test_pseudomanifold_examples(posets, tetra_boundary):
    assert is_pseudomanifold(posets["two-triangles"])
    assert is_pseudomanifold(posets["rp2-3vertex"])
    Q = tetra_boundary.subposet(set(tetra_boundary.elements) - {tetra_boundary.of_rank(3)[0]})
    rep = is_pseudomanifold(Q)
    assert not rep and rep.failed == "two-covers"
    assert orient_pseudomanifold(tetra_boundary) is not None
    assert orient_pseudomanifold(posets["rp2-6vertex"]) is None


def test_isomorphism_examples(posets, tetra_boundary):
    P = posets["two-triangles"]
    assert poset_isomorphic(P, P)[0]
    assert not poset_isomorphic(P, tetra_boundary)[0]
    assert not poset_isomorphic(posets["rp2-3vertex"], twin_top(simplex_boundary(2), "v0,v1"))[0]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_isomorphism_finds_relabelling(seed):
    rng = rng_for(seed)
    P = random_poset(rng)
    names = list(P.proper)
    shuffled = names[:]
    rng.shuffle(shuffled)
    m = {x: "z" + y for x, y in zip(names, shuffled)}
    Q = P.relabel(m)
    ok, found = poset_isomorphic(P, Q)
    assert ok
    for x in P.elements:
        assert {found[y] for y in P.down[x]} == set(Q.down[found[x]])


def test_facet_count_formula():
    for n in range(1, 5):
        assert fh_vector(simplex_boundary(n)).f == tuple(comb(n + 1, i) for i in range(n + 1))
