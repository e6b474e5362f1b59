import json
import os

import pytest

from commoncover import families
from commoncover.cli import (dump_graph, dump_object_graph, load_graph,
                             load_object_graph, main, write_json)
from commoncover.object_graphs import rotation_pair


def _write_graph(tmp_path, name, g):
    path = str(tmp_path / name)
    write_json(path, dump_graph(g))
    return path


def test_graph_round_trip(tmp_path):
    for name, g in (("c3", families.cycle(3)),
                    ("k4", families.complete(4)),
                    ("red", families.with_vertex_colour(families.cycle(4),
                                                        {"v00": "red"}))):
        path = _write_graph(tmp_path, name + ".json", g)
        assert load_graph(path) == g


def test_check_exit_codes(tmp_path):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    c4 = _write_graph(tmp_path, "c4.json", families.cycle(4))
    k4 = _write_graph(tmp_path, "k4.json", families.complete(4))
    assert main(["check", c3, c4]) == 0
    assert main(["check", c3, k4]) == 1


def test_build_star_and_verify(tmp_path):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    c4 = _write_graph(tmp_path, "c4.json", families.cycle(4))
    out = str(tmp_path / "out")
    assert main(["build", c3, c4, "--backend", "star", "--strategy", "dr",
                 "-o", out]) == 0
    with open(os.path.join(out, "cover.json")) as fh:
        payload = json.load(fh)
    assert len(payload["graph"]["vertices"]) == 12
    assert main(["verify", out, c3, c4]) == 0


def test_verify_detects_corruption(tmp_path):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    out = str(tmp_path / "out")
    assert main(["build", c3, c3, "--backend", "star", "-o", out]) == 0
    mu1 = os.path.join(out, "mu1.json")
    with open(mu1) as fh:
        data = json.load(fh)
    k = sorted(data["vmap"])[0]
    others = sorted(set(data["vmap"].values()) - {data["vmap"][k]})
    data["vmap"][k] = others[0]
    with open(mu1, "w") as fh:
        json.dump(data, fh)
    assert main(["verify", out, c3, c3]) in (1, 2)


def test_build_ball_writes_certificate(tmp_path):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    out = str(tmp_path / "ball")
    assert main(["build", c3, c3, "--backend", "ball", "-R", "1", "--based",
                 "--certificate-radius", "2", "-o", out]) == 0
    with open(os.path.join(out, "certificate.json")) as fh:
        cert = json.load(fh)
    assert cert["mismatches"] == 0
    assert cert["fixes_base_ball"] is True


def test_build_glue_backend(tmp_path):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    c4 = _write_graph(tmp_path, "c4.json", families.cycle(4))
    out = str(tmp_path / "glue")
    assert main(["build", c3, c4, "--backend", "glue", "-o", out]) == 0
    assert main(["verify", out, c3, c4]) == 0


def test_regular_command(tmp_path):
    k4 = _write_graph(tmp_path, "k4.json", families.complete(4))
    k33 = _write_graph(tmp_path, "k33.json", families.complete_bipartite(3, 3))
    out = str(tmp_path / "reg")
    assert main(["regular", k4, k33, "-o", out]) == 0
    assert main(["verify", out, k4, k33]) == 0


def test_bounds_command(capsys):
    assert main(["bounds", "--kind", "regular", "--v1", "4", "--v2", "6",
                 "--odd"]) == 0
    assert capsys.readouterr().out.strip() == "48"


def test_oracle_command(tmp_path, capsys):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    c4 = _write_graph(tmp_path, "c4.json", families.cycle(4))
    k4 = _write_graph(tmp_path, "k4.json", families.complete(4))
    assert main(["oracle", c3, c4, "--max", "4"]) == 0
    assert "12 vertices" in capsys.readouterr().out
    assert main(["oracle", c3, k4, "--max", "3"]) == 1


def test_export_dot(tmp_path, capsys):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    assert main(["export-dot", c3]) == 0
    out = capsys.readouterr().out
    assert out.startswith("graph G {")
    assert out.count(" -- ") == 3


def test_schema_errors_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["check", str(bad), str(bad)]) == 2
    worse = tmp_path / "worse.json"
    worse.write_text('{"vertices": [{"id": "v"}], "darts": [{"id": "e"}]}')
    assert main(["check", str(worse), str(worse)]) == 2


def test_build_objects_round_trip(tmp_path):
    x1, x2, seeds = rotation_pair(3)
    p1 = str(tmp_path / "x1.json")
    p2 = str(tmp_path / "x2.json")
    write_json(p1, dump_object_graph(x1))
    write_json(p2, dump_object_graph(x2))
    assert load_object_graph(p1).graph == x1.graph
    seeds_path = str(tmp_path / "seeds.json")
    write_json(seeds_path, {"seeds": [
        {"from": s.src, "to": s.dst, "dart_map": s.dart_map,
         "edge_maps": {d: {"vmap": dict(m.vmap), "emap": dict(m.emap)}
                       for d, m in s.edge_maps.items()},
         "vertex_map": {"vmap": dict(s.vertex_map.vmap),
                        "emap": dict(s.vertex_map.emap)}}
        for s in seeds]})
    out = str(tmp_path / "objcover")
    assert main(["build-objects", p1, p2, "--seeds", seeds_path,
                 "-o", out]) == 0
    with open(os.path.join(out, "cover.json")) as fh:
        payload = json.load(fh)
    assert len(payload["vertices"]) % 3 == 0


def _dir_bytes(path):
    out = {}
    for name in sorted(os.listdir(path)):
        with open(os.path.join(path, name), "rb") as fh:
            out[name] = fh.read()
    return out


@pytest.mark.parametrize("argv_tail", [
    ["--backend", "star", "--strategy", "dr"],
    ["--backend", "star", "--strategy", "aligned"],
    ["--backend", "ball", "-R", "1", "--based"],
    ["--backend", "glue", "-R", "1"],
])
def test_build_is_deterministic(tmp_path, argv_tail):
    c3 = _write_graph(tmp_path, "c3.json", families.cycle(3))
    c4 = _write_graph(tmp_path, "c4.json", families.cycle(4))
    out1, out2 = str(tmp_path / "one"), str(tmp_path / "two")
    assert main(["build", c3, c4, *argv_tail, "-o", out1]) == 0
    assert main(["build", c3, c4, *argv_tail, "-o", out2]) == 0
    left, right = _dir_bytes(out1), _dir_bytes(out2)
    assert left.keys() == right.keys()
    for name in left:
        assert left[name] == right[name], name


def test_build_objects_is_deterministic(tmp_path):
    x1, x2, seeds = rotation_pair(3)
    p1, p2 = str(tmp_path / "x1.json"), str(tmp_path / "x2.json")
    write_json(p1, dump_object_graph(x1))
    write_json(p2, dump_object_graph(x2))
    seeds_path = str(tmp_path / "seeds.json")
    write_json(seeds_path, {"seeds": [
        {"from": s.src, "to": s.dst, "dart_map": s.dart_map,
         "edge_maps": {d: {"vmap": dict(m.vmap), "emap": dict(m.emap)}
                       for d, m in s.edge_maps.items()},
         "vertex_map": {"vmap": dict(s.vertex_map.vmap),
                        "emap": dict(s.vertex_map.emap)}}
        for s in seeds]})
    one, two = str(tmp_path / "one"), str(tmp_path / "two")
    assert main(["build-objects", p1, p2, "--seeds", seeds_path, "-o", one]) == 0
    assert main(["build-objects", p1, p2, "--seeds", seeds_path, "-o", two]) == 0
    left, right = _dir_bytes(one), _dir_bytes(two)
    assert left.keys() == right.keys()
    for name in left:
        assert left[name] == right[name]
