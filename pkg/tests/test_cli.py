import io
import json
import subprocess
import sys

import pytest

from torusposet.cli import run
from torusposet.sposet import load_poset, fh_vector
from torusposet.torusgraph import load_graph


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_graph_validate():
    code, out, _ = call("graph", "validate", "fig1a")
    assert code == 0 and records(out)["status"] == "valid torus graph, n=2"


def test_poset_fh():
    code, out, _ = call("poset", "fh", "two-triangles")
    assert code == 0
    assert records(out) == {"f": "[1, 3, 3, 2]", "h": "[1, 0, 0, 1]"}
    code, out, _ = call("--json", "poset", "fh", "two-triangles")
    assert json.loads(out) == {"f": [1, 3, 3, 2], "h": [1, 0, 0, 1]}


def test_cm_dichotomy():
    code, out, _ = call("homology", "cm", "rp2-3vertex", "--coeffs", "f2")
    assert code == 2
    rec = records(out)
    assert rec["status"] == "not Cohen-Macaulay"
    w = json.loads(rec["witnesses"])[0]
    assert (w["simplex"], w["dimension"]) == ("<empty>", 1)
    code, out, _ = call("homology", "cm", "rp2-3vertex", "--coeffs", "q")
    assert code == 0 and records(out)["status"] == "Cohen-Macaulay"


def test_ring_commands():
    assert records(call("ring", "mul", "fig1a", "v[e]*v[g]")[1])["result"] == "v[p] + v[q]"
    assert records(call("ring", "mul", "fig1a", "v[p]", "v[q]")[1])["result"] == "0"
    assert records(call("ring", "mul", "fig1b", "v[E]*v[G]*v[H]")[1])["result"] == "v[p] + v[q]"
    code, out, _ = call("--json", "ring", "hilbert", "fig1a", "--upto", "2")
    assert code == 0 and [r["dim"] for r in json.loads(out)["hilbert"]] == [1, 2, 4]
    code, out, _ = call("--json", "ring", "quotient-dim", "rp2-3vertex", "--coeffs", "q", "--upto", "3")
    assert code == 0 and json.loads(out)["dims"] == [1, 0, 3, 0]
    code, _, _ = call("ring", "lsop-check", "rp2-3vertex", "--lsop", "v[p];v[q];v[q]")
    assert code == 2


def test_graph_property_failures():
    assert call("graph", "orient", "k4-rp2")[0] == 2
    assert call("graph", "orient", "fig1a")[0] == 0
    assert call("graph", "cocheck", "fig1a", '{"p": "t1", "q": "0"}')[0] == 2
    assert call("graph", "cocheck", "fig1a", '{"p": "t1 + t2", "q": "t1 + t2"}')[0] == 0
    assert call("graph", "rank", "fig1b", "--upto", "4", "--check")[0] == 0
    assert call("graph", "ds", "k4-rp2")[0] == 0


def test_blowup_commands(tmp_path):
    code, out, _ = call("blowup", "verify", "fig4-vertex-blowup")
    assert code == 0 and records(out)["thom_pullback"] == "True"
    assert call("blowup", "correspondence", "fig3-edge-blowup")[0] == 0
    path = tmp_path / "blown.json"
    code, _, _ = call("blowup", "apply", "fig4-vertex-blowup", "-o", str(path))
    assert code == 0 and len(load_graph(path).vertices) == 6


def test_poset_outputs(tmp_path):
    path = tmp_path / "sd.json"
    assert call("poset", "stellar", "two-triangles", "T1", "-o", str(path))[0] == 0
    assert fh_vector(load_poset(path)).f == (1, 4, 6, 4)
    path = tmp_path / "g.json"
    assert call("graph", "from-poset", "rp2-3vertex", "-o", str(path))[0] == 0
    assert len(load_graph(path).vertices) == 4
    assert call("poset", "iso", "two-triangles", "two-triangles")[0] == 0
    assert call("poset", "iso", "two-triangles", "rp2-3vertex")[0] == 2


def test_input_errors(tmp_path):
    code, out, err = call("graph", "validate", "does-not-exist")
    assert code == 1 and err.startswith("error:")
    raw = json.loads(open(_corpus("fig1a")).read())
    raw["edges"][1]["alpha_from_first"] = ["1", "0"]
    raw["edges"][1]["alpha_from_second"] = ["1", "0"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    code, _, err = call("graph", "validate", str(bad))
    assert code == 1 and "witness: p" in err
    assert call("ring", "mul", "fig1a", "v[nope]")[0] == 1
    assert call("graph", "no-such-command")[0] == 1


def test_corpus_dir_env(tmp_path, monkeypatch):
    (tmp_path / "fig1a.json").write_text(open(_corpus("fig1b")).read())
    monkeypatch.setenv("CORPUS_DIR", str(tmp_path))
    assert records(call("graph", "validate", "fig1a")[1])["status"] == "valid torus graph, n=3"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "torusposet", "poset", "fh", "rp2-6vertex"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "h: [1, 3, 6, 0]" in proc.stdout


def _corpus(name):
    from torusposet.corpus import resolve
    return resolve(name)
