import json

import pytest

from extremal_ellipsoids.cli import main

SQUARE = {"points": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}
BOX = {"halfspaces": [{"a": [1, 0], "b": 1}, {"a": [-1, 0], "b": 1},
                      {"a": [0, 1], "b": 1}, {"a": [0, -1], "b": 1}]}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)
    return _write


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_solve_enclose_square(capsys, write):
    code, out = run(capsys, ["solve", "--mode", "enclose", "--f", "volume", "--in", write("s.json", SQUARE)])
    assert code == 0
    assert out["result"]["semi_axes"] == pytest.approx([2**0.5] * 2, abs=1e-6)
    assert set(out["result"]) >= {"affine", "quadric", "objective", "slack", "converged"}


@pytest.mark.filterwarnings("ignore:volume o w")
def test_solve_inscribe_box(capsys, write):
    code, out = run(capsys, ["solve", "--mode", "inscribe", "--f", "volume", "--in", write("b.json", BOX)])
    assert code == 0
    assert out["result"]["semi_axes"] == pytest.approx([1, 1], abs=1e-6)


def test_solve_dual(capsys, write):
    code, out = run(capsys, ["solve", "--mode", "dual", "--f", "sqrt_sum", "--center", "0.5", "0",
                             "--in", write("b.json", BOX)])
    assert code == 0
    assert out["result"]["semi_axes"] == pytest.approx([0.5, 1], abs=1e-6)


def test_solve_multistart_counterexample(capsys, write):
    code, out = run(capsys, ["solve", "--mode", "enclose", "--f", "square_counterexample",
                             "--in", write("s.json", SQUARE), "--multistart", "8"])
    assert code == 0
    assert out["multistart"]["clusters"] == 2


def test_solve_config_override(capsys, write):
    doc = dict(SQUARE, config={"outer_rounds": 3})
    code, _ = run(capsys, ["solve", "--in", write("s.json", doc)])
    assert code == 0
    doc = dict(SQUARE, config={"bogus": 1})
    code, _ = run(capsys, ["solve", "--in", write("s.json", doc)])
    assert code == 1


def test_solve_usage_errors(capsys, write, tmp_path):
    assert main(["solve", "--in", str(tmp_path / "missing.json")]) == 1
    assert main(["solve", "--in", write("bad.json", "{not json")]) == 1
    assert main(["solve", "--f", "nope", "--in", write("s.json", SQUARE)]) == 1
    assert main(["solve", "--mode", "inscribe", "--in", write("s.json", SQUARE)]) == 1
    cube = {"points": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]}
    assert main(["solve", "--f", "square_counterexample", "--in", write("c.json", cube)]) == 1
    ragged = {"halfspaces": [{"a": [1, 0], "b": 1}, {"a": [1], "b": 1}]}
    assert main(["solve", "--mode", "inscribe", "--in", write("r.json", ragged)]) == 1
    with pytest.raises(SystemExit) as info:
        main(["solve", "--mode", "sideways"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_solve_preflight_exit_two(capsys, write):
    unbounded = {"halfspaces": BOX["halfspaces"][:3]}
    code, out = run(capsys, ["solve", "--mode", "inscribe", "--in", write("u.json", unbounded)])
    assert code == 2 and "certificate" in out
    code, _ = run(capsys, ["solve", "--mode", "dual", "--center", "3", "0", "--in", write("b.json", BOX)])
    assert code == 2


def test_verify_lemma_ok(capsys):
    code, out = run(capsys, ["verify", "--lemma", "1", "--d", "2", "--trials", "20", "--seed", "7"])
    assert code == 0 and out["violations"] == 0


def test_verify_lemma4_three_d_is_usage():
    assert main(["verify", "--lemma", "4", "--d", "3"]) == 1


def test_verify_probe_violation(capsys):
    code, out = run(capsys, ["verify", "--probe", "square_counterexample", "--p", "-0.5",
                             "--property", "convex", "--trials", "500"])
    assert code == 3
    assert out["vector"]["violations"] > 0 and out["vector"]["witness"] is not None


def test_verify_probe_clean(capsys):
    code, out = run(capsys, ["verify", "--probe", "volume", "--p", "-1", "--trials", "500"])
    assert code == 0 and out["agree"]


def test_verify_other_suites(capsys):
    code, out = run(capsys, ["verify", "--lemma", "strict-betweenness", "--trials", "20"])
    assert code == 0 and out["failures"] == 0
    code, out = run(capsys, ["verify", "--lemma", "round-trip", "--trials", "20"])
    assert code == 0


def test_verify_needs_selection():
    assert main(["verify"]) == 1


def test_probe_command(capsys):
    code, out = run(capsys, ["probe", "--f", "sqrt_sum", "--p", "1", "--property", "concave",
                             "--trials", "300"])
    assert code == 0
    assert [r["domain"] for r in out["reports"]] == ["nonnegative", "matrices"]
    assert out["agree"]
    assert main(["probe", "--f", "volume"]) == 1


def test_between_command(capsys, write):
    doc = {"E0": {"P": [[1, 0], [0, 1]], "t": [0, 0]}, "E1": {"P": [[3, 0], [0, 3]], "t": [0, 0]}}
    code, out = run(capsys, ["between", "--in", write("e.json", doc), "--kind", "image", "--lam", "0.5"])
    assert code == 0 and out["semi_axes"] == pytest.approx([2, 2])
    code, out = run(capsys, ["between", "--in", write("e.json", doc), "--kind", "preimage"])
    assert out["semi_axes"] == pytest.approx([1.5, 1.5])
    circles = {"E0": {"center": [0, 0], "shape": [[1, 0], [0, 1]]},
               "E1": {"center": [0, 0], "shape": [[0.25, 0], [0, 0.25]]}, "shift": [0, 0]}
    code, out = run(capsys, ["between", "--in", write("c.json", circles), "--kind", "homogeneous"])
    assert sum(out["quadric"]["shape"], []) == pytest.approx([5 / 8, 0, 0, 5 / 8])
    far = {"E0": {"center": [-5, 0], "shape": [[1, 0], [0, 100]]},
           "E1": {"center": [5, 0], "shape": [[100, 0], [0, 1]]}}
    code, out = run(capsys, ["between", "--in", write("f.json", far), "--kind", "dual"])
    assert code == 0 and out["is_ellipsoid"] is False
    with pytest.raises(SystemExit):
        main(["between", "--in", write("e.json", doc), "--lam", "2"])


def test_repro_outputs_deterministic(capsys, tmp_path):
    for cmd, stem in (("repro-square", "square"), ("repro-triangle", "triangle")):
        outs = []
        for i in range(2):
            d = tmp_path / f"{stem}{i}"
            assert main([cmd, "--out", str(d)]) == 0
            capsys.readouterr()
            outs.append(((d / f"{stem}.csv").read_bytes(), (d / f"{stem}.json").read_bytes()))
        assert outs[0] == outs[1]


def test_repro_triangle_modulus_flag(capsys):
    code, out = run(capsys, ["repro-triangle", "--modulus", "paper"])
    assert code == 0 and list(out["moduli"]) == ["paper"]
