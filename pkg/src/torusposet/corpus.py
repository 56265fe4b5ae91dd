"""Bundled example graphs and posets.

Files are looked up in ``$CORPUS_DIR`` first and then in the copy shipped
with the package.
"""
import json
import os
from importlib import resources

from .errors import ValidationError
from .sposet import validate_poset
from .torusgraph import validate_graph

GRAPHS = ("fig1a", "fig1b", "k4-rp2", "fig3-edge-blowup", "fig4-vertex-blowup")
POSETS = ("two-triangles", "rp2-3vertex", "rp2-6vertex", "bipyramid-glued")


def _bundled():
    return resources.files("torusposet") / "corpus"


def resolve(name):
    """Path of an input given as a file path or a corpus name."""
    if os.path.isfile(name):
        return name
    stem = name[:-5] if name.endswith(".json") else name
    env = os.environ.get("CORPUS_DIR")
    if env:
        cand = os.path.join(env, stem + ".json")
        if os.path.isfile(cand):
            return cand
    cand = _bundled() / (stem + ".json")
    if cand.is_file():
        return str(cand)
    raise FileNotFoundError(f"no such file or corpus entry: {name}")


def load_raw(name):
    with open(resolve(name), encoding="utf-8") as fh:
        return json.load(fh)


def kind_of(raw):
    if "edges" in raw and "n" in raw:
        return "graph"
    if "elements" in raw:
        return "poset"
    raise ValidationError("input is neither a graph nor a poset description")


def load(name):
    raw = load_raw(name)
    return validate_graph(raw) if kind_of(raw) == "graph" else validate_poset(raw)


def load_graph(name):
    raw = load_raw(name)
    if kind_of(raw) != "graph":
        raise ValidationError(f"{name} is not a torus graph description")
    return validate_graph(raw)


def load_poset(name):
    raw = load_raw(name)
    if kind_of(raw) != "poset":
        raise ValidationError(f"{name} is not a poset description")
    return validate_poset(raw)


def stored_lsop(P):
    """The ``lsop`` entry of a poset file as a list of {vertex: int} dicts."""
    raw = P.meta.get("lsop")
    if raw is None:
        return None
    return [{v: int(c) for v, c in th.items()} for th in raw]
