import subprocess
from fractions import Fraction
import sys

import pytest

from conftest import CORPUS
from tatgraph.cli import main
from tatgraph.tatg import parse


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    lines = out.out.strip().splitlines()
    return code, lines[-1] if lines else "", out


K23 = CORPUS / "k23.tatg"
NONREG = CORPUS / "non_regular2.tatg"


@pytest.mark.parametrize("argv,code,last", [
    (["validate", K23], 0, "VALID"),
    (["invariants", K23], 0, "INVARIANTS V=5 E=6 chi=-1 b=1 g=1"),
    (["check", K23], 0, "TAT HOLDS"),
    (["check", "--ell", "1/2", K23], 1, "TAT FAILS witness=e1:1/4"),
    (["sigma", K23], 0, "SIGMA order=6"),
    (["fdtc", K23], 0, "FDTC F1 = 1/6"),
    (["check", "--mixed", NONREG], 0, "MIXED TAT HOLDS"),
    (["screws", NONREG], 0, "SCREW level=1 orbit=1 value=-1"),
    (["dual", NONREG], 0, "DUAL vertices=2 edges=3 tree=no"),
    (["dual", CORPUS / "example_thm.tatg"], 0, "DUAL vertices=3 edges=2 tree=yes"),
    (["walk", K23, "--dart", 1, "--offset", "1/4"], 0, "END dart=11 offset=1/4 point=e6:1/4"),
    (["check", CORPUS / "circle2.tatg"], 0, "TAT HOLDS"),
])
def test_final_lines(capsys, argv, code, last):
    got_code, got_last, _ = run(capsys, *argv)
    assert (got_code, got_last) == (code, last)


def test_usage_errors_exit_two(capsys):
    code, _, out = run(capsys, "validate", CORPUS / "missing.tatg")
    assert code == 2
    assert "cannot read" in out.err
    assert main(["nonsense"]) == 2


def test_fit_counterexample(capsys):
    code, last, out = run(capsys, "fit", CORPUS / "counterexample.tatg", "--rot", "F1=1/2", "--rot", "F2=1/2")
    assert (code, last) == (1, "FIT INFEASIBLE zero=e3")


def test_gen_and_blowup_output_parses(capsys):
    code, _, out = run(capsys, "gen", "kpq", 2, 3)
    assert code == 0
    doc = parse(out.out)
    assert len(doc.graph.edges) == 6
    code, _, out = run(capsys, "blowup", K23, "--vertex", "a1", "--eps", "1/8")
    doc = parse(out.out)
    assert [n for n, _ in doc.rel.components] == ["A1", "A2"]


def test_realize_specs(capsys):
    code, _, out = run(capsys, "realize", CORPUS / "specs" / "example_thm_spec.tatg")
    assert code == 0
    doc = parse(out.out)
    assert set(doc.delta.resolve(doc.filtered(), 1).values()) == {Fraction(1, 18)}


def test_pipe_through_stdin():
    gen = subprocess.run([sys.executable, "-m", "tatgraph.cli", "gen", "kpq", "3", "3", "--len", "1/12"],
                         capture_output=True, text=True, check=True)
    res = subprocess.run([sys.executable, "-m", "tatgraph.cli", "check", "--mixed", "-"],
                         input=gen.stdout, capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip().splitlines()[-1] == "MIXED TAT HOLDS"


def test_color_is_off_when_not_a_tty(capsys, monkeypatch):
    monkeypatch.setenv("TATG_COLOR", "auto")
    _, last, out = run(capsys, "check", K23)
    assert "\x1b[" not in out.out


def test_attach_glues_an_orbit(capsys, tmp_path):
    from tatgraph.periodic import BoundaryOrbit as B, OrbitSpec, realize_periodic, relative_from_capped
    from tatgraph.ribbon import edge_of
    from tatgraph.tatg import graph_document, serialize
    from tatgraph.walks import scale_metric
    root = realize_periodic(OrbitSpec(0, 2, [B(Fraction(1, 2), 1, 1)], [1, 1, 1], marked=1))
    g, m, rel, signs = relative_from_capped(root, None, Fraction(1, 36))
    circle = rel.names()[0]
    length = sum(m[edge_of(d)] for d in rel.component(circle))
    torus = realize_periodic(OrbitSpec(1, 1, [B(0, 0, 0)]))
    (face,) = torus.graph.faces()
    pm = scale_metric(torus.metric, length / sum(torus.metric[edge_of(d)] for d in face))
    base_file, piece_file = tmp_path / "base.tatg", tmp_path / "piece.tatg"
    base_file.write_text(serialize(graph_document(g, m, rel, name="base")))
    piece_file.write_text(serialize(graph_document(torus.graph, pm, name="torus")))
    code, _, out = run(capsys, "attach", base_file, "--piece", piece_file, "--circle", circle,
                       "--face", min(face), "--screw", -1, "--alpha", 2)
    assert code == 0
    glued = tmp_path / "glued.tatg"
    glued.write_text(out.out)
    assert run(capsys, "check", "--mixed", glued)[:2] == (0, "MIXED TAT HOLDS")
    assert run(capsys, "screws", glued)[1] == "SCREW level=1 orbit=1 value=-1"
    assert run(capsys, "dual", glued)[1] == "DUAL vertices=3 edges=2 tree=yes"
