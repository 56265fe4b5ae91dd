"""Acceptance criteria, one test per criterion.

Each criterion records a one-line verdict; the lines are printed at the end
of the pytest run (see conftest.py) and by ``python tests/test_acceptance.py``.
"""
import copy
import sys
import time
from math import comb

import pytest

from torusposet import corpus
from torusposet.blowup import blow_up, stellar_correspondence, verify_thom_pullback
from torusposet.errors import ValidationError
from torusposet.exactla import rank_q
from torusposet.facering import (
    RingElement,
    beta_map,
    chain_monomials,
    hilbert_function,
    linear_element,
    lsop_check,
    parse_ring,
    quotient_graded_dim,
    straighten_mul,
)
from torusposet.generators import cm_seeds, find_lsop, random_poset, random_stellar, rng_for
from torusposet.homology import cm_check, homology
from torusposet.sposet import (
    SimplicialPoset,
    barycentric_subdivide,
    dehn_sommerville,
    euler_characteristic,
    fh_vector,
    order_complex,
    poset_from_facets,
    poset_isomorphic,
    stellar_subdivide,
)
from torusposet.torusgraph import (
    NonOrientable,
    constant_lsop,
    face_poset,
    graph_from_poset,
    graph_isomorphic,
    orientation,
    phi_iso_check,
    thom_relation_check,
    validate_graph,
)

THREE = ("fig1a", "fig1b", "k4-rp2")
RESULTS = {}


def record(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def glued_segments():
    return SimplicialPoset({"a": 1, "b": 1, "s": 2, "t": 2},
                           {"a": {"^0"}, "b": {"^0"}, "s": {"a", "b"}, "t": {"a", "b"}})


def bipyramid():
    return poset_from_facets([("N", "a", "b"), ("N", "b", "c"), ("N", "c", "a"),
                              ("S", "a", "b"), ("S", "b", "c"), ("S", "c", "a")])


def series_coefficients(f, top):
    """Coefficients of sum_i f_(i-1) s^i / (1 - s)^i up to s^top, by power-series products."""
    out = [0] * (top + 1)
    geometric = [1] * (top + 1)  # 1/(1-s)
    for i in range(1, len(f)):
        term = [0] * (top + 1)
        if i <= top:
            term[i] = f[i]
        for _ in range(i):
            term = [sum(term[k] * geometric[j - k] for k in range(j + 1)) for j in range(top + 1)]
        out = [a + b for a, b in zip(out, term)]
    out[0] += 1
    return out


def perturbations(raw):
    """Single-edge changes of an axial value that keep the sign condition
    but break the basis condition, plus one-sided changes breaking the sign."""
    for k, el in enumerate(raw["edges"]):
        for scale in (2, 0):
            bad = copy.deepcopy(raw)
            e = bad["edges"][k]
            e["alpha_from_first"] = [str(scale * int(x)) for x in e["alpha_from_first"]]
            e["alpha_from_second"] = [str(scale * int(x)) for x in e["alpha_from_second"]]
            yield "basis", el["id"], tuple(el["ends"]), bad
        bad = copy.deepcopy(raw)
        bad["edges"][k]["alpha_from_second"] = [str(3 * int(x)) for x in el["alpha_from_second"]]
        yield "sign", el["id"], tuple(el["ends"]), bad


# ----- criteria ------------------------------------------------------------

def criterion_1():
    for name in THREE:
        corpus.load_graph(name)
    checked = 0
    for name in THREE:
        raw = corpus.load_raw(name)
        for kind, edge, ends, bad in perturbations(raw):
            try:
                validate_graph(bad)
            except ValidationError as exc:
                where = exc.witness
                if kind == "basis" and (where not in ends or "lattice basis" not in str(exc)):
                    return False, f"{name}: {edge} rejected without a vertex witness ({exc})"
                if kind == "sign" and where != edge:
                    return False, f"{name}: {edge} sign change located at {where!r}"
                checked += 1
            else:
                return False, f"{name}: perturbing {edge} was accepted"
    return True, f"3 corpus graphs valid; {checked} perturbations rejected with located witnesses"


def criterion_2():
    G = {name: corpus.load_graph(name) for name in THREE}
    pairs = [(face_poset(G["fig1a"]), glued_segments()),
             (face_poset(G["fig1b"]), corpus.load_poset("two-triangles")),
             (face_poset(G["k4-rp2"]), corpus.load_poset("rp2-3vertex"))]
    ok = all(poset_isomorphic(a, b)[0] for a, b in pairs)
    return ok, "fig1a, fig1b, k4-rp2 face posets match the glued segments, glued triangles and RP^2 cell posets"


def criterion_3():
    Pa = face_poset(corpus.load_graph("fig1a"))
    Pb = face_poset(corpus.load_graph("fig1b"))
    r1 = straighten_mul(Pa, RingElement.gen(Pa, "e"), RingElement.gen(Pa, "g"))
    r2 = straighten_mul(Pa, RingElement.gen(Pa, "p"), RingElement.gen(Pa, "q"))
    eg = straighten_mul(Pb, RingElement.gen(Pb, "E"), RingElement.gen(Pb, "G"))
    r3 = straighten_mul(Pb, eg, RingElement.gen(Pb, "H"))
    ok = (r1 == parse_ring(Pa, "v[p] + v[q]") and r2.is_zero()
          and r3 == parse_ring(Pb, "v[p] + v[q]"))
    return ok, f"v_e v_g = {r1}; v_p v_q = {r2}; v_E v_G v_H = {r3}"


def criterion_4():
    count = 0
    for name in THREE:
        G = corpus.load_graph(name)
        for F1 in G.faces:
            for F2 in G.faces:
                if not thom_relation_check(G, F1, F2):
                    return False, f"{name}: fails for {G.face_id(F1)}, {G.face_id(F2)}"
                count += 1
    return True, f"{count} ordered face pairs agree vertexwise"


def criterion_5():
    for name in THREE:
        G = corpus.load_graph(name)
        for d in range(G.n + 3):
            ok, info = phi_iso_check(G, d, report=True)
            if not ok:
                return False, f"{name}, d={d}: {info}"
    return True, "ranks equal the Hilbert function and Thom images span, d = 0..n+2"


def criterion_6():
    rng = rng_for(6)
    for k in range(60):
        P = random_poset(rng, max_rank=4)
        f = fh_vector(P).f
        top = P.n + 2
        expect = series_coefficients(f, top)
        got = [hilbert_function(P, d) for d in range(top + 1)]
        if got != expect or got != [len(chain_monomials(P, d)) for d in range(top + 1)]:
            return False, f"poset #{k} f={f}: {got} vs {expect}"
    return True, "60 random posets, coefficients up to t^(2n+4)"


def criterion_7():
    rng = rng_for(7)
    for k in range(120):
        P = random_poset(rng, max_rank=4)
        r = dehn_sommerville(P)
        if r.lhs != r.rhs:
            return False, f"poset #{k}: {r.lhs} vs {r.rhs}"
    tt = fh_vector(corpus.load_poset("two-triangles")).h
    rp2 = corpus.load_poset("rp2-6vertex")
    r = dehn_sommerville(rp2)
    chi_gap = euler_characteristic(rp2) - 2  # chi(RP^2) - chi(S^2)
    printed = tuple((-1) ** (i + 1) * comb(3, i) for i in range(4))
    from_chi = tuple((-1) ** i * chi_gap * comb(3, i) for i in range(4))
    ok = (tt == (1, 0, 0, 1) and fh_vector(rp2).h == (1, 3, 6, 0) and r.equal
          and chi_gap == -1 and r.defect == printed == from_chi)
    return ok, f"120 random posets; h(two-triangles)={tt}; RP^2 h={fh_vector(rp2).h}, defect={r.defect}"


def criterion_8():
    t0 = time.perf_counter()
    ok = True
    for name in ("rp2-3vertex", "rp2-6vertex"):
        P = corpus.load_poset(name)
        ok &= bool(cm_check(P, "q")) and not cm_check(P, "f2")
    tetra = poset_from_facets([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    for P in (tetra, corpus.load_poset("two-triangles")):
        ok &= all(bool(cm_check(P, c)) for c in ("z", "q", "f2"))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 30, "RP^2 posets CM over Q only; sphere posets CM over Z, Q and F2"


def criterion_9():
    names = list(corpus.POSETS)
    posets = [corpus.load_poset(n) for n in names]
    posets += [face_poset(corpus.load_graph(n)) for n in corpus.GRAPHS]
    ok = all(poset_isomorphic(barycentric_subdivide(P), order_complex(P))[0] for P in posets)
    return ok, f"{len(posets)} corpus posets (including graph face posets)"


def criterion_10():
    G = corpus.load_graph("fig4-vertex-blowup")
    s = G.meta["blowup_face"]
    P = face_poset(G)
    Q = stellar_subdivide(P, s)
    # degreewise injective up to cohomological degree 2n
    for d in range(G.n + 1):
        basis = chain_monomials(P, d)
        target = {m: i for i, m in enumerate(chain_monomials(Q, d))}
        rows = []
        for m in basis:
            img = beta_map(P, s, RingElement(P, {m: 1}), Q)
            rows.append({target[k]: c for k, c in img.terms.items()})
        if rank_q(rows) != len(basis):
            return False, f"beta not injective in degree {d}"
    # multiplicative on all generator pairs
    gens = list(P.proper)
    for a in gens:
        for b in gens:
            lhs = beta_map(P, s, straighten_mul(P, RingElement.gen(P, a), RingElement.gen(P, b)), Q)
            rhs = straighten_mul(Q, beta_map(P, s, RingElement.gen(P, a), Q),
                                 beta_map(P, s, RingElement.gen(P, b), Q))
            if lhs != rhs:
                return False, f"beta(v_{a} v_{b}) differs from the product of images"
    # transports the constant lsop
    thetas = [beta_map(P, s, linear_element(P, th), Q) for th in constant_lsop(G)]
    if not (lsop_check(Q, thetas, "z")[0] and lsop_check(Q, thetas, "q")[0]):
        return False, "image of the constant lsop is not an lsop"
    ok, info = stellar_correspondence(G, s, detail=True)
    if not (ok and info["beta_checked"] and info["beta_agrees"]):
        return False, f"beta and the blow-down pullback disagree: {info}"
    return True, f"{len(gens) ** 2} generator pairs; injective to degree {G.n}; lsop transported; agrees with b*"


def criterion_11():
    out = []
    for name, vertices in (("fig3-edge-blowup", 10), ("fig4-vertex-blowup", 6)):
        G = corpus.load_graph(name)
        F = G.face(G.meta["blowup_face"])
        Gt, b = blow_up(G, F)
        if len(Gt.vertices) != vertices:
            return False, f"{name}: {len(Gt.vertices)} vertices"
        for p, row in b.normals.items():
            vals = [G.alpha[G.half_at(p, e)] for e in row]
            for i in range(len(row)):
                for j in range(i + 1, len(row)):
                    e = f"{p}~{i + 1}-{j + 1}"
                    want = tuple(y - x for x, y in zip(vals[i], vals[j]))
                    if Gt.alpha[(e, 0)] != want or Gt.alpha[(e, 1)] != tuple(-x for x in want):
                        return False, f"{name}: new edge {e} has {Gt.alpha[(e, 0)]}, expected {want}"
            for j, e in enumerate(row, start=1):
                if Gt.alpha[Gt.half_at(f"{p}~{j}", e)] != G.alpha[G.half_at(p, e)]:
                    return False, f"{name}: normal edge {e} changed its value"
        for e in F.edges:
            for j in range(1, G.n - F.dim + 1):
                if (Gt.alpha[(f"{e}~{j}", 0)], Gt.alpha[(f"{e}~{j}", 1)]) != (G.alpha[(e, 0)], G.alpha[(e, 1)]):
                    return False, f"{name}: copy {e}~{j} changed its value"
        if not verify_thom_pullback(G, F):
            return False, f"{name}: Thom pullback fails"
        if not poset_isomorphic(face_poset(Gt), stellar_subdivide(face_poset(G), G.face_id(F)))[0]:
            return False, f"{name}: face poset of the blow-up is not the stellar subdivision"
        out.append(f"{name}: {vertices} vertices")
    return True, "; ".join(out) + "; all new values are differences of normal values"


def criterion_12():
    for name in THREE:
        G = corpus.load_graph(name)
        H = graph_from_poset(face_poset(G), constant_lsop(G))
        if not graph_isomorphic(G, H)[0]:
            return False, f"{name}: round trip fails"
    P = corpus.load_poset("rp2-3vertex")
    K = graph_from_poset(P, [{"p": 1}, {"q": 1}, {"r": 1}])
    ok = graph_isomorphic(K, corpus.load_graph("k4-rp2"), match_alpha=True)[0]
    return ok, "three graphs recovered from their face posets; RP^2 poset gives K4 with matching axial values"


def criterion_13():
    P = corpus.load_poset("bipyramid-glued")
    G = graph_from_poset(P, corpus.stored_lsop(P))
    Pg = face_poset(G)
    ok = not poset_isomorphic(Pg, P)[0] and poset_isomorphic(Pg, bipyramid())[0]
    return ok, "face poset of the built graph is the bipyramid, not the glued poset"


def criterion_14():
    o = orientation(corpus.load_graph("fig1a"))
    if o != {"p": 1, "q": -1}:
        return False, f"fig1a orientation {o}"
    if not isinstance(orientation(corpus.load_graph("k4-rp2")), NonOrientable):
        return False, "k4-rp2 reported orientable"
    verdicts = []
    for name in corpus.GRAPHS:
        G = corpus.load_graph(name)
        H = homology(order_complex(face_poset(G)), "z")
        top_is_z = H.betti[G.n - 1] == 1 and not H.torsion[G.n - 1]
        orientable = not isinstance(orientation(G), NonOrientable)
        if top_is_z != orientable:
            return False, f"{name}: orientable={orientable}, top homology {H.describe(G.n - 1)}"
        verdicts.append(f"{name}={'yes' if orientable else 'no'}")
    return True, "orientable iff top homology is Z: " + ", ".join(verdicts)


def criterion_15():
    rng = rng_for(15)
    seeds = cm_seeds()
    done = 0
    while done < 32:
        P = random_stellar(rng, rng.choice(seeds), rng.randint(0, 2))
        if not cm_check(P, "q"):
            return False, "a seed poset is not CM"
        Q = stellar_subdivide(P, rng.choice(P.proper))
        if not cm_check(Q, "q"):
            return False, f"CM lost after subdivision (poset #{done})"
        thetas = find_lsop(rng, Q, "q")
        if thetas is None:
            return False, f"no lsop found for poset #{done}"
        dims = [quotient_graded_dim(Q, thetas, d, "q") for d in range(Q.n + 2)]
        if dims != list(fh_vector(Q).h) + [0]:
            return False, f"poset #{done}: quotient {dims} vs h {fh_vector(Q).h}"
        done += 1
    return True, f"{done} random CM posets stay CM; quotient dimensions equal the h-vector"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 16)}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[number]()
    elapsed = time.perf_counter() - t0
    record(number, ok, f"{detail} [{elapsed:.1f}s]")
    assert ok, detail


def main():
    failed = 0
    for number in sorted(CRITERIA):
        t0 = time.perf_counter()
        try:
            ok, detail = CRITERIA[number]()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        record(number, ok, f"{detail} [{time.perf_counter() - t0:.1f}s]")
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
