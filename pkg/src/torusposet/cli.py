"""Command-line interface.

Exit codes: 0 success, 1 bad input (with a located witness on standard
error), 2 a checked property does not hold.
"""
import argparse
import json
import os
import sys

from . import corpus
from .blowup import blow_up, stellar_correspondence, verify_thom_pullback
from .errors import TorusPosetError, ValidationError
from .exactla import Coeffs
from .facering import (
    RingElement,
    beta_map,
    hilbert_function,
    lsop_check,
    parse_ring,
    quotient_graded_dim,
    restriction,
)
from .homology import cm_check, homology
from .parsing import ParseError, parse_poly
from .polyring import render
from .sposet import (
    BOTTOM,
    barycentric_subdivide,
    boundary_star,
    dehn_sommerville,
    dumps_poset,
    fh_vector,
    is_pseudomanifold,
    is_simplicial_complex,
    link,
    order_complex,
    poset_isomorphic,
    star,
    stellar_subdivide,
)
from .torusgraph import (
    NonOrientable,
    constant_lsop,
    ds_graph_check,
    dumps_graph,
    euler_number,
    face_poset,
    graded_cohomology_rank,
    graph_from_poset,
    is_cohomology_class,
    orientation,
    phi_iso_check,
    thom_class,
)


class PropertyFailed(Exception):
    """Raised with the report when a checked property does not hold."""

    def __init__(self, report):
        super().__init__("property check failed")
        self.report = report


# ----- helpers ----------------------------------------------------------

def _coeffs(text):
    try:
        return Coeffs.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _poly_text(f):
    return render(f)


def _class_text(G, f):
    return {p: _poly_text(f[p]) for p in G.vertices}


def _elem_name(x):
    return "0^" if x == BOTTOM else x


def _poset_summary(P):
    fh = fh_vector(P)
    return {
        "rank": P.n,
        "elements": len(P.proper),
        "f": list(fh.f),
        "h": list(fh.h),
        "simplicial_complex": is_simplicial_complex(P),
    }


def _emit_file(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return {"written": out}
    return text


def _load_lsop(P, spec):
    """lsop from a JSON list, a file, ``;``-separated linear expressions,
    the poset file's ``lsop`` entry, or vertex generators."""
    if spec is None:
        stored = corpus.stored_lsop(P)
        if stored is not None:
            return stored
        verts = P.vertices()
        if len(verts) == P.n:
            return [{v: 1} for v in sorted(verts)]
        raise ValidationError("no lsop given (use --lsop)")
    text = spec
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    text = text.strip()
    if text.startswith("["):
        return [{v: int(c) for v, c in th.items()} for th in json.loads(text)]
    out = []
    for piece in text.split(";"):
        x = parse_ring(P, piece)
        th = {}
        for mono, c in x.terms.items():
            if len(mono) != 1 or mono[0][1] != 1 or P.rank[mono[0][0]] != 1:
                raise ValidationError(f"{piece.strip()!r} is not a linear combination of vertices")
            th[mono[0][0]] = c
        out.append(th)
    return out


def _lsop_text(P, thetas):
    return [str(RingElement(P, {((v, 1),): c for v, c in th.items() if c})) for th in thetas]


def _poset(name):
    """A poset file, or the face poset of a graph file."""
    obj = corpus.load(name)
    return obj if not hasattr(obj, "edges") else face_poset(obj)


def _face_arg(G, name):
    if name is None:
        name = G.meta.get("blowup_face")
        if name is None:
            raise ValidationError("no face given and the graph file names none")
    return G.face(name)


def _face_record(G, F):
    return {
        "id": _elem_name(G.face_id(F)),
        "dim": F.dim,
        "vertices": sorted(F.vertices),
        "edges": sorted(F.edges),
    }


def _element(P, name):
    if name in ("0^", BOTTOM):
        return BOTTOM
    if name not in P:
        raise ValidationError(f"unknown poset element {name!r}", name)
    return name


def _degrees(args):
    if args.upto is not None:
        return list(range(args.upto + 1))
    return [args.degree]


# ----- graph commands ---------------------------------------------------

def graph_validate(args):
    G = corpus.load_graph(args.graph)
    return {"status": f"valid torus graph, n={G.n}", "vertices": len(G.vertices), "edges": len(G.edges)}


def graph_faces(args):
    G = corpus.load_graph(args.graph)
    faces = [F for F in G.faces if args.dim is None or F.dim == args.dim]
    return {"count": len(faces), "faces": [_face_record(G, F) for F in faces]}


def graph_face_poset(args):
    G = corpus.load_graph(args.graph)
    return _emit_file(dumps_poset(face_poset(G)), args.output)


def graph_thom(args):
    G = corpus.load_graph(args.graph)
    F = G.face(args.face)
    return {"face": _elem_name(G.face_id(F)), "values": _class_text(G, thom_class(G, F))}


def graph_cocheck(args):
    G = corpus.load_graph(args.graph)
    text = args.values
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)
    missing = [p for p in G.vertices if p not in raw]
    if missing:
        raise ValidationError(f"no value given at vertex {missing[0]!r}", missing[0])
    f = {p: parse_poly(str(raw[p]), G.n) for p in G.vertices}
    ok, bad = is_cohomology_class(G, f)
    report = {"cohomology_class": ok}
    if not ok:
        report["failing_edge"] = bad
        raise PropertyFailed(report)
    return report


def graph_rank(args):
    G = corpus.load_graph(args.graph)
    rows = []
    failed = False
    for d in _degrees(args):
        rec = {"degree": d, "rank": graded_cohomology_rank(G, d)}
        if args.check:
            ok, info = phi_iso_check(G, d, report=True)
            rec.update(hilbert=info["hilbert"], thom_span_saturated=info["saturated_span"], iso=ok)
            failed |= not ok
        rows.append(rec)
    report = {"ranks": rows}
    if failed:
        raise PropertyFailed(report)
    return report


def graph_orient(args):
    G = corpus.load_graph(args.graph)
    o = orientation(G)
    if isinstance(o, NonOrientable):
        raise PropertyFailed({"orientable": False, "witness_cycle": list(o.cycle)})
    return {"orientable": True, "orientation": {p: o[p] for p in G.vertices}}


def graph_euler(args):
    G = corpus.load_graph(args.graph)
    F = G.face(args.face)
    return {"face": _elem_name(G.face_id(F)), "euler_number": euler_number(G, F)}


def graph_ds(args):
    G = corpus.load_graph(args.graph)
    lhs, rhs, eq = ds_graph_check(G)
    report = {"lhs": list(lhs), "rhs": list(rhs), "equal": eq}
    if not eq:
        raise PropertyFailed(report)
    return report


def graph_from_poset_cmd(args):
    P = _poset(args.poset)
    G = graph_from_poset(P, _load_lsop(P, args.lsop))
    return _emit_file(dumps_graph(G), args.output)


def graph_constant_lsop(args):
    G = corpus.load_graph(args.graph)
    P = face_poset(G)
    thetas = constant_lsop(G)
    ok, bad = lsop_check(P, thetas, Coeffs("z"))
    report = {"lsop": _lsop_text(P, thetas), "integral_lsop": ok}
    if not ok:
        report["failing_simplex"] = bad
        raise PropertyFailed(report)
    return report


# ----- poset commands ---------------------------------------------------

def poset_validate(args):
    P = _poset(args.poset)
    kind = "simplicial complex" if is_simplicial_complex(P) else "simplicial poset"
    return {"status": f"valid {kind}, rank {P.n}", **_poset_summary(P)}


def poset_fh(args):
    fh = fh_vector(_poset(args.poset))
    return {"f": list(fh.f), "h": list(fh.h)}


def poset_ds(args):
    r = dehn_sommerville(_poset(args.poset))
    report = {"lhs": list(r.lhs), "rhs": list(r.rhs), "equal": r.equal, "defect": list(r.defect)}
    if not r.equal:
        raise PropertyFailed(report)
    return report


def _sub_report(Q):
    return {"elements": sorted(_elem_name(x) for x in Q.proper), **_poset_summary(Q)}


def poset_star(args):
    P = _poset(args.poset)
    s = _element(P, args.simplex)
    rep = {"star": _sub_report(star(P, s))}
    if s != BOTTOM:
        rep["boundary_star"] = _sub_report(boundary_star(P, s))
    return rep


def poset_link(args):
    P = _poset(args.poset)
    return {"link": _sub_report(link(P, _element(P, args.simplex)))}


def poset_stellar(args):
    P = _poset(args.poset)
    return _emit_file(dumps_poset(stellar_subdivide(P, _element(P, args.simplex))), args.output)


def poset_barycentric(args):
    P = _poset(args.poset)
    return _emit_file(dumps_poset(barycentric_subdivide(P)), args.output)


def poset_order_complex(args):
    P = _poset(args.poset)
    return _emit_file(dumps_poset(order_complex(P)), args.output)


def poset_pseudomanifold(args):
    r = is_pseudomanifold(_poset(args.poset))
    if not r.ok:
        raise PropertyFailed({"pseudomanifold": False, "failed": r.failed, "witness": repr(r.witness)})
    return {"pseudomanifold": True}


def poset_iso(args):
    P, Q = _poset(args.first), _poset(args.second)
    ok, mapping = poset_isomorphic(P, Q)
    if not ok:
        raise PropertyFailed({"isomorphic": False})
    return {"isomorphic": True, "map": {_elem_name(k): _elem_name(v) for k, v in sorted(mapping.items())}}


# ----- ring commands ----------------------------------------------------

def ring_mul(args):
    P = _poset(args.poset)
    out = RingElement.one(P)
    for text in args.exprs:
        out = out * parse_ring(P, text)
    return {"result": str(out)}


def ring_restrict(args):
    P = _poset(args.poset)
    s = _element(P, args.at)
    f = restriction(P, parse_ring(P, args.expr), s)
    atoms = sorted(P.atoms(s)) if s != BOTTOM else []
    return {
        "at": _elem_name(s),
        "variables": {f"t{i + 1}": v for i, v in enumerate(atoms)},
        "result": _poly_text(f),
    }


def ring_hilbert(args):
    P = _poset(args.poset)
    return {"hilbert": [{"degree": d, "cohomological_degree": 2 * d, "dim": hilbert_function(P, d)}
                        for d in _degrees(args)]}


def ring_lsop_check(args):
    P = _poset(args.poset)
    thetas = _load_lsop(P, args.lsop)
    ok, bad = lsop_check(P, thetas, args.coeffs)
    report = {"lsop": _lsop_text(P, thetas), "coeffs": str(args.coeffs), "is_lsop": ok}
    if not ok:
        report["failing_simplex"] = _elem_name(bad)
        raise PropertyFailed(report)
    return report


def ring_beta(args):
    P = _poset(args.poset)
    s = _element(P, args.simplex)
    return {"result": str(beta_map(P, s, parse_ring(P, args.expr)))}


def ring_quotient_dim(args):
    P = _poset(args.poset)
    thetas = _load_lsop(P, args.lsop)
    coeffs = args.coeffs if args.coeffs.is_field else Coeffs("q")
    dims = [quotient_graded_dim(P, thetas, d, coeffs) for d in _degrees(args)]
    return {"coeffs": str(coeffs), "dims": dims, "h": list(fh_vector(P).h)}


# ----- homology commands ------------------------------------------------

def homology_compute(args):
    P = _poset(args.poset)
    K = P if is_simplicial_complex(P) else barycentric_subdivide(P)
    H = homology(K, args.coeffs)
    return {
        "coeffs": str(args.coeffs),
        "subdivided": K is not P,
        "reduced_homology": {str(d): H.describe(d) for d in sorted(H.betti) if d >= 0 or not H.is_zero(d)},
    }


def homology_cm(args):
    P = _poset(args.poset)
    r = cm_check(P, args.coeffs)
    report = {
        "coeffs": str(args.coeffs),
        "status": "Cohen-Macaulay" if r.is_cm else "not Cohen-Macaulay",
    }
    if not r.is_cm:
        report["witnesses"] = [
            {"simplex": s, "dimension": i, "group": g, "text": f"H~_{i}(lk {s}) = {g} != 0"}
            for s, i, g in r.witnesses
        ]
        raise PropertyFailed(report)
    return report


# ----- blow-up commands -------------------------------------------------

def blowup_apply(args):
    G = corpus.load_graph(args.graph)
    F = _face_arg(G, args.face)
    Gt, b = blow_up(G, F)
    text = dumps_graph(Gt)
    report = {
        "face": _elem_name(G.face_id(F)),
        "vertices": len(Gt.vertices),
        "edges": len(Gt.edges),
        "exceptional_facet": _elem_name(Gt.face_id(b.exceptional)),
        "blow_down": {v: b.vertex_map[v] for v in Gt.vertices},
    }
    if args.output:
        _emit_file(text, args.output)
        report["written"] = args.output
    else:
        report["graph"] = json.loads(text)
    return report


def blowup_verify(args):
    G = corpus.load_graph(args.graph)
    F = _face_arg(G, args.face)
    ok, per = verify_thom_pullback(G, F, detail=True)
    report = {"face": _elem_name(G.face_id(F)), "thom_pullback": ok, "facets": per}
    if not ok:
        raise PropertyFailed(report)
    return report


def blowup_correspondence(args):
    G = corpus.load_graph(args.graph)
    F = _face_arg(G, args.face)
    ok, info = stellar_correspondence(G, F, detail=True)
    info.pop("beta_failures", None)
    report = {"face": _elem_name(G.face_id(F)), "correspondence": ok, **info}
    if not ok:
        raise PropertyFailed(report)
    return report


# ----- argument parsing -------------------------------------------------

def build_parser():
    # the flag may appear before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    coeffs = argparse.ArgumentParser(add_help=False)
    coeffs.add_argument("--coeffs", type=_coeffs, default=Coeffs("z"), help="z, q or fp:<prime>")
    degrees = argparse.ArgumentParser(add_help=False)
    g = degrees.add_mutually_exclusive_group()
    g.add_argument("--degree", type=int, default=1, help="algebraic degree d (cohomological 2d)")
    g.add_argument("--upto", type=int, help="all degrees 0..UPTO")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", help="write the result file here")

    parser = argparse.ArgumentParser(prog="torusposet", parents=[common],
                                     description="Torus graphs, simplicial posets and face rings.")
    top = parser.add_subparsers(dest="group", required=True)

    def cmd(group, name, func, *parents, help=None):
        p = group.add_parser(name, parents=[common, *parents], help=help)
        p.set_defaults(func=func)
        return p

    gr = top.add_parser("graph", help="torus graph operations").add_subparsers(dest="cmd", required=True)
    cmd(gr, "validate", graph_validate).add_argument("graph")
    p = cmd(gr, "faces", graph_faces)
    p.add_argument("graph")
    p.add_argument("--dim", type=int)
    p = cmd(gr, "face-poset", graph_face_poset, output)
    p.add_argument("graph")
    p = cmd(gr, "thom", graph_thom)
    p.add_argument("graph")
    p.add_argument("face")
    p = cmd(gr, "cocheck", graph_cocheck)
    p.add_argument("graph")
    p.add_argument("values", help='JSON object vertex -> polynomial, e.g. \'{"p": "t1", "q": "0"}\'')
    p = cmd(gr, "rank", graph_rank, degrees)
    p.add_argument("graph")
    p.add_argument("--check", action="store_true", help="compare with the face ring")
    cmd(gr, "orient", graph_orient).add_argument("graph")
    p = cmd(gr, "euler", graph_euler)
    p.add_argument("graph")
    p.add_argument("face")
    cmd(gr, "ds", graph_ds).add_argument("graph")
    p = cmd(gr, "from-poset", graph_from_poset_cmd, output)
    p.add_argument("poset")
    p.add_argument("--lsop")
    cmd(gr, "constant-lsop", graph_constant_lsop).add_argument("graph")

    po = top.add_parser("poset", help="simplicial poset operations").add_subparsers(dest="cmd", required=True)
    for name, func in [("validate", poset_validate), ("fh", poset_fh), ("ds", poset_ds),
                       ("pseudomanifold", poset_pseudomanifold)]:
        cmd(po, name, func).add_argument("poset")
    for name, func in [("star", poset_star), ("link", poset_link)]:
        p = cmd(po, name, func)
        p.add_argument("poset")
        p.add_argument("simplex")
    p = cmd(po, "stellar", poset_stellar, output)
    p.add_argument("poset")
    p.add_argument("simplex")
    for name, func in [("barycentric", poset_barycentric), ("order-complex", poset_order_complex)]:
        cmd(po, name, func, output).add_argument("poset")
    p = cmd(po, "iso", poset_iso)
    p.add_argument("first")
    p.add_argument("second")

    ri = top.add_parser("ring", help="face ring operations").add_subparsers(dest="cmd", required=True)
    p = cmd(ri, "mul", ring_mul)
    p.add_argument("poset")
    p.add_argument("exprs", nargs="+")
    p = cmd(ri, "restrict", ring_restrict)
    p.add_argument("poset")
    p.add_argument("expr")
    p.add_argument("--at", required=True)
    p = cmd(ri, "hilbert", ring_hilbert, degrees)
    p.add_argument("poset")
    p = cmd(ri, "lsop-check", ring_lsop_check, coeffs)
    p.add_argument("poset")
    p.add_argument("--lsop")
    p = cmd(ri, "beta", ring_beta)
    p.add_argument("poset")
    p.add_argument("simplex")
    p.add_argument("expr")
    p = cmd(ri, "quotient-dim", ring_quotient_dim, coeffs, degrees)
    p.add_argument("poset")
    p.add_argument("--lsop")

    ho = top.add_parser("homology", help="homology and Cohen-Macaulay test").add_subparsers(dest="cmd", required=True)
    cmd(ho, "compute", homology_compute, coeffs).add_argument("poset")
    cmd(ho, "cm", homology_cm, coeffs).add_argument("poset")

    bl = top.add_parser("blowup", help="blow-ups of torus graphs").add_subparsers(dest="cmd", required=True)
    for name, func, extra in [("apply", blowup_apply, [output]), ("verify", blowup_verify, []),
                              ("correspondence", blowup_correspondence, [])]:
        p = cmd(bl, name, func, *extra)
        p.add_argument("graph")
        p.add_argument("face", nargs="?", help="face id (default: the file's blowup_face)")
    return parser


def _print(result, as_json, stream):
    if isinstance(result, str):
        stream.write(result)
        return
    if as_json:
        stream.write(json.dumps(result, indent=2, ensure_ascii=False) + "\n")
        return
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        stream.write(f"{key}: {value}\n")


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        result = args.func(args)
    except PropertyFailed as exc:
        _print(exc.report, getattr(args, "json", False), stdout)
        return 2
    except (TorusPosetError, ParseError, FileNotFoundError, KeyError, ValueError, json.JSONDecodeError) as exc:
        witness = getattr(exc, "witness", None)
        msg = f"error: {exc}"
        if witness is not None:
            msg += f" [witness: {witness}]"
        stderr.write(msg + "\n")
        return 1
    _print(result, getattr(args, "json", False), stdout)
    return 0


def main():
    sys.exit(run())
