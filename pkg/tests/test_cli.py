from __future__ import annotations

import json
import subprocess
import sys

import pytest

from morsetrace import cli, fileio
from morsetrace.chainmaps import SimplicialMap
from morsetrace.complex import SimplicialComplex, cycle_graph
from morsetrace.errors import DomainError
from morsetrace.fileio import ParseError
from morsetrace.morse import DiscreteVectorField
from morsetrace.spheres import build_zp_circle, circle_field, wrap_map


def write(path, doc):
    fileio.write_json(path, doc)
    return str(path)


@pytest.fixture
def hexagon(tmp_path):
    v = circle_field(6)
    doc = fileio.complex_to_json(v.complex)
    doc.update(fileio.dvf_to_json(v))
    return write(tmp_path / "hex.json", doc)


class TestFiles:
    def test_complex_round_trip_is_byte_identical(self, tmp_path):
        k = SimplicialComplex.from_maximal([(0, 1, 2), (2, 3), (4,)], labels={0: "a", 1: "b", 2: "c", 3: "d", 4: "e"})
        p = tmp_path / "k.json"
        fileio.write_json(p, fileio.complex_to_json(k))
        first = p.read_bytes()
        doc, _ = fileio.read_json(p)
        again = fileio.complex_from_json(doc)
        assert again == k and again.labels == k.labels
        fileio.write_json(p, fileio.complex_to_json(again))
        assert p.read_bytes() == first

    def test_field_and_map_round_trip(self, tmp_path):
        v = circle_field(6)
        assert fileio.dvf_from_json(json.loads(fileio.dumps(fileio.dvf_to_json(v))), v.complex).pairs == v.pairs
        c = cycle_graph(6)
        f = SimplicialMap(c, c, {i: (i + 1) % 6 for i in range(6)})
        doc = fileio.map_to_json(f)
        assert doc["vertex_map"]["0"] == 1
        assert fileio.map_from_json(doc, c, c).vertex_map == f.vertex_map

    def test_action_round_trip(self):
        w, a = build_zp_circle(3, 2)
        b = fileio.action_from_json(fileio.action_to_json(a), w.complex)
        assert b.generator == a.generator and b.p == 3

    def test_malformed_json_location(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"maximal_simplices": [[0, 1],\n  [1 2]]}\n')
        with pytest.raises(ParseError) as exc:
            fileio.read_json(p)
        assert exc.value.line == 2 and exc.value.column is not None

    def test_non_integer_vertex(self):
        with pytest.raises(DomainError):
            fileio.complex_from_json({"maximal_simplices": [[0, "x"]]})


class TestCheck:
    def test_hexagon(self, hexagon):
        rep, code = cli.run(["check", hexagon])
        assert code == 0 and rep["status"] == "pass"
        r = rep["result"]
        assert r["f_vector"] == [6, 6] and r["gradient"] is True
        assert r["critical"]["simplices"] == [[0], [2, 3]]
        assert r["sphere_witness"]["ok"] is True
        assert list(rep["inputs"]) == [hexagon]
        assert len(rep["inputs"][hexagon]) == 64

    def test_closed_trajectory(self, tmp_path):
        c = cycle_graph(3)
        v = DiscreteVectorField(c, [((0,), (0, 1)), ((1,), (1, 2)), ((2,), (0, 2))])
        kp = write(tmp_path / "c3.complex.json", fileio.complex_to_json(c))
        vp = write(tmp_path / "c3.dvf.json", fileio.dvf_to_json(v))
        rep, code = cli.run(["check", kp, vp])
        assert code == 1
        assert rep["result"]["gradient"] is False
        assert rep["result"]["closed_trajectory"]["faces"][0] == [0, 1]

    def test_invalid_field(self, tmp_path):
        c = cycle_graph(4)
        kp = write(tmp_path / "c.json", fileio.complex_to_json(c))
        vp = write(tmp_path / "v.json", {"pairs": [[[0], [0, 1]], [[0], [0, 3]]]})
        rep, code = cli.run(["check", kp, vp])
        assert code == 1 and rep["result"]["valid"]["ok"] is False

    def test_malformed_exit_code(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{\n  \"maximal_simplices\": [[0, 1]\n")
        rep, code = cli.run(["check", str(p)])
        assert code == 2 and rep["status"] == "error"
        assert rep["result"]["location"]["line"] >= 2

    def test_missing_file(self, tmp_path):
        _, code = cli.run(["check", str(tmp_path / "nope.json")])
        assert code == 2

    def test_usage_error(self):
        rep, code = cli.run(["check"])
        assert code == 2 and rep["command"] == "check"


class TestHopf:
    def test_identity(self, hexagon):
        rep, code = cli.run(["hopf", hexagon])
        assert code == 0 and rep["result"] == {"lhs": 0, "rhs": 0, "equal": True}

    def test_zero_and_random(self, hexagon):
        assert cli.run(["hopf", hexagon, "--map", "zero"])[1] == 0
        a, _ = cli.run(["hopf", hexagon, "--map", "random", "--seed", "4"])
        b, _ = cli.run(["--seed", "4", "hopf", hexagon, "--map", "random"])
        assert a["result"] == b["result"] and a["result"]["equal"]

    def test_map_file(self, hexagon, tmp_path):
        c = cycle_graph(6)
        mp = write(tmp_path / "refl.json", fileio.map_to_json(SimplicialMap(c, c, {i: (-i) % 6 for i in range(6)})))
        rep, code = cli.run(["hopf", hexagon, "--map", mp])
        assert code == 0 and rep["result"]["lhs"] == 2 == rep["result"]["rhs"]
        assert set(rep["inputs"]) == {hexagon, mp}

    def test_no_field(self, tmp_path):
        kp = write(tmp_path / "c.json", fileio.complex_to_json(cycle_graph(4)))
        assert cli.run(["hopf", kp])[1] == 2


class TestBuild:
    def test_skeleton_minus_facet(self, tmp_path):
        rep, code = cli.run(["build", "skeleton", "3", "2", "--minus-facet", "--output-dir", str(tmp_path)])
        assert code == 0
        assert rep["result"]["critical"]["simplices"] == [[3]]
        assert (tmp_path / "skeleton_3_2.dvf.json").exists()

    def test_skeleton_sphere(self, tmp_path):
        rep, code = cli.run(["build", "skeleton", "4", "3", "--output-dir", str(tmp_path)])
        assert code == 0 and rep["result"]["f_vector"] == [5, 10, 10, 5]

    def test_zp_circle_then_bd_then_degree(self, tmp_path):
        out = str(tmp_path)
        assert cli.run(["build", "zp-circle", "3", "2", "--name", "c6", "--output-dir", out])[1] == 0
        rep, code = cli.run(["build", "bd", str(tmp_path / "c6.json"), "--name", "c6bd", "--output-dir", out])
        assert code == 0 and rep["result"]["action_free"]["ok"]
        rep, code = cli.run(["build", "bd", str(tmp_path / "c6bd.json"), "--name", "c6bd2", "--output-dir", out])
        assert code == 0 and rep["result"]["f_vector"] == [24, 24]
        mp = write(tmp_path / "wrap.json", fileio.map_to_json(wrap_map(6, 2)))
        rep, code = cli.run(["degree", mp, str(tmp_path / "c6bd2.json"), "--k", "2",
                             "--target", str(tmp_path / "c6.json"), "--action", str(tmp_path / "c6.action.json")])
        assert code == 0, rep
        r = rep["result"]
        assert (r["degree"], r["oracle_degree"], r["agree"], r["p"], r["residue"], r["pass"]) == (4, 4, True, 3, 1, True)
        assert r["equivariant"]["ok"] is True

    def test_join_of_zero_spheres(self, tmp_path):
        out = str(tmp_path)
        s0 = {"maximal_simplices": [[0], [1]], "pairs": [[[], [0]]]}
        p = write(tmp_path / "s0.json", s0)
        rep, code = cli.run(["build", "join", p, p, "--name", "sq", "--output-dir", out])
        assert code == 0
        assert rep["result"]["f_vector"] == [4, 4]
        doc, _ = fileio.read_json(tmp_path / "sq.dvf.json")
        assert sorted(map(lambda x: [list(x[0]), list(x[1])], doc["pairs"])) == \
            sorted([[[], [2]], [[0], [0, 2]], [[1], [1, 2]], [[3], [0, 3]]])

    def test_cone(self, tmp_path):
        out = str(tmp_path)
        cli.run(["build", "skeleton", "2", "1", "--minus-facet", "--name", "path", "--output-dir", out])
        rep, code = cli.run(["build", "cone", str(tmp_path / "path.json"), "--with-base", "--output-dir", out])
        assert code == 0 and rep["result"]["critical"]["census"] == {"0": 1}

    def test_bad_arguments(self, tmp_path):
        assert cli.run(["build", "zp-circle", "4", "1", "--output-dir", str(tmp_path)])[1] == 2
        assert cli.run(["build", "skeleton", "3", "1", "--minus-facet", "--output-dir", str(tmp_path)])[1] == 2


class TestDegree:
    def test_identity_level_zero(self, hexagon, tmp_path):
        c = cycle_graph(6)
        mp = write(tmp_path / "id.json", fileio.map_to_json(SimplicialMap(c, c, {i: i for i in range(6)})))
        rep, code = cli.run(["degree", mp, hexagon])
        assert code == 0 and rep["result"]["degree"] == 1 == rep["result"]["oracle_degree"]

    def test_collapsed_map_degree_zero(self, hexagon, tmp_path):
        c = cycle_graph(6)
        mp = write(tmp_path / "fold.json", fileio.map_to_json(SimplicialMap(c, c, {i: i % 2 for i in range(6)})))
        rep, code = cli.run(["degree", mp, hexagon])
        assert code == 0 and rep["result"]["degree"] == 0

    def test_target_needed(self, hexagon, tmp_path):
        c = cycle_graph(6)
        mp = write(tmp_path / "id.json", fileio.map_to_json(SimplicialMap(c, c, {i: i for i in range(6)})))
        assert cli.run(["degree", mp, hexagon, "--k", "1"])[1] == 2

    def test_disagreement_is_integrity_error(self, hexagon, tmp_path, monkeypatch):
        c = cycle_graph(6)
        mp = write(tmp_path / "id.json", fileio.map_to_json(SimplicialMap(c, c, {i: i for i in range(6)})))
        monkeypatch.setattr(cli, "degree_oracle_preimage", lambda f, k: 7)
        rep, code = cli.run(["degree", mp, hexagon])
        assert code == 3 and rep["result"]["kind"] == "IntegrityError"


class TestBatch:
    def test_order_and_codes(self, hexagon, tmp_path):
        manifest = write(tmp_path / "m.json", {"jobs": [["hopf", hexagon], ["check", str(tmp_path / "missing.json")],
                                                         ["check", hexagon]]})
        rep, code = cli.run(["batch", manifest, "--workers", "2"])
        assert code == 1
        assert rep["result"]["exit_codes"] == [0, 2, 0]
        assert [j["command"] for j in rep["result"]["jobs"]] == ["hopf", "check", "check"]

    def test_bad_manifest(self, tmp_path):
        manifest = write(tmp_path / "m.json", {"jobs": "nope"})
        assert cli.run(["batch", manifest])[1] == 2


class TestMain:
    def test_summary_line(self, hexagon, capsys):
        assert cli.main(["hopf", hexagon, "--no-json"]) == 0
        assert capsys.readouterr().out.strip() == "hopf: pass lhs=0, rhs=0, equal=True"

    def test_module_entry_point(self, hexagon):
        proc = subprocess.run([sys.executable, "-m", "morsetrace", "check", hexagon],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["status"] == "pass"

    def test_help(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "degree" in capsys.readouterr().out
