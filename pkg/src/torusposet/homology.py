"""Reduced simplicial homology and the Cohen-Macaulay test.

Chains are built on vertex sets; the boundary of [v0, ..., vd] (vertices
in sorted order) is the alternating sum of its facets, and every vertex
maps to the empty simplex, which gives reduced homology.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import ValidationError
from .exactla import QQ, ZZ, Coeffs, elementary_divisors, rank_q
from .sposet import BOTTOM, barycentric_subdivide, is_simplicial_complex

__all__ = ["HomologyGroups", "CMReport", "homology", "homology_of_faces", "cm_check"]


@dataclass(frozen=True)
class HomologyGroups:
    """Reduced homology; ``betti[d]`` and ``torsion[d]`` for d = -1..top."""

    coeffs: Coeffs
    betti: dict
    torsion: dict

    def is_zero(self, d):
        return self.betti.get(d, 0) == 0 and not self.torsion.get(d)

    def describe(self, d):
        parts = []
        b = self.betti.get(d, 0)
        ring = {"z": "Z", "q": "Q"}.get(self.coeffs.kind, f"F{self.coeffs.p}")
        if b:
            parts.append(ring if b == 1 else f"{ring}^{b}")
        parts.extend(f"Z/{t}" for t in self.torsion.get(d, ()))
        return " + ".join(parts) or "0"

    def euler_characteristic(self):
        """Reduced Euler characteristic plus one (the usual chi)."""
        return 1 + sum((-1) ** d * b for d, b in self.betti.items())


@dataclass(frozen=True)
class CMReport:
    is_cm: bool
    witnesses: list = field(default_factory=list)  # (simplex, dim, group text)

    def __bool__(self):
        return self.is_cm


def _boundary_rows(faces_d, index_lower):
    rows = []
    for f in faces_d:
        row = {}
        for i in range(len(f)):
            row[index_lower[f[:i] + f[i + 1:]]] = -1 if i % 2 else 1
        rows.append(row)
    return rows


def _rank_and_torsion(rows, ncols, coeffs):
    if not rows or not ncols:
        return 0, []
    if coeffs.kind == "z":
        divs = elementary_divisors(rows)
        return len(divs), [d for d in divs if d > 1]
    if coeffs.kind == "q":
        return rank_q(rows), []
    dense = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, x in row.items():
            dense[i, j] = x
    return _accel.rank_mod_p(dense, coeffs.p), []


def homology_of_faces(faces, coeffs=ZZ):
    """Reduced homology of the complex given by its simplices.

    ``faces`` is an iterable of vertex collections closed under taking
    subsets; the empty simplex is added if absent.
    """
    if isinstance(coeffs, str):
        coeffs = Coeffs.parse(coeffs)
    by_dim = {}
    for f in faces:
        t = tuple(sorted(f))
        by_dim.setdefault(len(t) - 1, set()).add(t)
    by_dim.setdefault(-1, set()).add(())
    top = max(by_dim)
    ordered = {d: sorted(by_dim.get(d, ())) for d in range(-1, top + 1)}
    index = {d: {f: i for i, f in enumerate(ordered[d])} for d in ordered}
    rk, tors = {}, {}
    for d in range(0, top + 1):
        rows = _boundary_rows(ordered[d], index[d - 1])
        # rows index d-simplices, so this is the transpose of the boundary map
        rk[d], tors[d] = _rank_and_torsion(rows, len(ordered[d - 1]), coeffs)
    betti, torsion = {}, {}
    for d in range(-1, top + 1):
        betti[d] = len(ordered[d]) - rk.get(d, 0) - rk.get(d + 1, 0)
        torsion[d] = sorted(tors.get(d + 1, []))
    return HomologyGroups(coeffs, betti, torsion)


def _vertex_sets(K):
    return [tuple(sorted(K.atoms(x))) for x in K.proper]


def homology(K, coeffs=ZZ):
    """Reduced homology of a poset that is a simplicial complex."""
    if not is_simplicial_complex(K):
        raise ValidationError("homology needs a simplicial complex; subdivide first")
    return homology_of_faces(_vertex_sets(K), coeffs)


def cm_check(P, coeffs=ZZ, first_only=False):
    """Cohen-Macaulay test through links of the barycentric subdivision.

    For every simplex s of K = barycentric_subdivide(P), including the empty
    one, the reduced homology of lk s must vanish below dim lk s.  Over Z
    torsion counts as non-vanishing.

    This is Reisner's criterion.  It is equivalent to the vanishing of the
    local cohomology of |P| below top degree, since the local cohomology at
    a point in the interior of s is the reduced cohomology of lk s shifted
    by dim s + 1.  Subdividing first makes every link a simplicial complex.
    """
    if isinstance(coeffs, str):
        coeffs = Coeffs.parse(coeffs)
    K = barycentric_subdivide(P)
    faces = [frozenset(f) for f in _vertex_sets(K)] + [frozenset()]
    containing = {}
    for i, f in enumerate(faces):
        for v in f:
            containing.setdefault(v, set()).add(i)
    every = set(range(len(faces)))
    witnesses = []
    for s in sorted(faces, key=lambda f: (len(f), sorted(f))):
        cof = every.copy()
        for v in s:
            cof &= containing[v]
        lk = [faces[i] - s for i in cof]
        dim = max(len(f) for f in lk) - 1
        if dim < 1 and s:
            continue  # only i < 0 would matter; a nonempty link has H~_{-1} = 0
        H = homology_of_faces(lk, coeffs)
        for i in range(-1, dim):
            if not H.is_zero(i):
                name = "<empty>" if not s else "{" + ", ".join(sorted(s)) + "}"
                witnesses.append((name, i, H.describe(i)))
        if witnesses and first_only:
            break
    return CMReport(not witnesses, witnesses)
