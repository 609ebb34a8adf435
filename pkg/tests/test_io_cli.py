"""Net file round trips, schema errors, SVG rendering and CLI behavior."""

import json
import math
import os
import subprocess
import sys

import pytest

from gnet import cli, constructions, netfile, render
from gnet import net as N
from gnet import surfaces as S
from gnet.errors import NetInvariantViolated, SchemaError

FLAT = S.flat()


def fermat_net():
    leaves = [FLAT.point(math.cos(t), math.sin(t))
              for t in (0.3, 0.3 + 2 * math.pi / 3, 0.3 + 4 * math.pi / 3)]
    return constructions.build_fermat_net(leaves)


def run_cli(args):
    return cli.main(list(args))


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def test_round_trip_identity(tmp_path):
    net = fermat_net()
    p1 = tmp_path / "net.json"
    p2 = tmp_path / "net2.json"
    netfile.save(net, p1)
    loaded = netfile.load(p1)
    netfile.save(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert sorted(loaded.vertices) == sorted(net.vertices)
    for vid in net.vertices:
        assert loaded.point(vid).coords == net.point(vid).coords
        assert loaded.is_fixed(vid) == net.is_fixed(vid)
    assert loaded.edges == net.edges


def test_fig2_round_trip_byte_identical(tmp_path):
    net, _cen = constructions.build_fig2_net()
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    netfile.save(net, p1)
    netfile.save(netfile.load(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_schema_errors_are_field_precise():
    with pytest.raises(SchemaError) as err:
        netfile.net_from_dict({"vertices": [], "edges": []})
    assert err.value.field == "surface"
    base = {"surface": {"kind": "flat", "curvature": 0.0},
            "vertices": [{"id": "a", "coords": [0, 0], "fixed": True},
                         {"id": "b", "coords": [1, 0], "fixed": True}],
            "edges": [["a", "b"]]}
    bad = json.loads(json.dumps(base))
    bad["surface"]["kind"] = "torus"
    with pytest.raises(SchemaError) as err:
        netfile.net_from_dict(bad)
    assert err.value.field == "surface.kind"
    bad = json.loads(json.dumps(base))
    bad["vertices"][1]["coords"] = [1]
    with pytest.raises(SchemaError) as err:
        netfile.net_from_dict(bad)
    assert err.value.field == "vertices[1].coords"
    bad = json.loads(json.dumps(base))
    bad["edges"].append(["a", "ghost"])
    with pytest.raises(SchemaError) as err:
        netfile.net_from_dict(bad)
    assert err.value.field == "edges[1]"
    bad = json.loads(json.dumps(base))
    bad["vertices"][1]["fixed"] = "yes"
    with pytest.raises(SchemaError):
        netfile.net_from_dict(bad)


def test_duplicate_edge_rejected():
    data = {"surface": {"kind": "flat", "curvature": 0.0},
            "vertices": [{"id": "a", "coords": [0, 0], "fixed": True},
                         {"id": "b", "coords": [1, 0], "fixed": True}],
            "edges": [["a", "b"], ["b", "a"]]}
    with pytest.raises(NetInvariantViolated) as err:
        netfile.net_from_dict(data)
    assert err.value.which == "simple-graph"


def test_hyperbolic_out_of_disk_rejected():
    data = {"surface": {"kind": "hyperbolic", "curvature": -1.0},
            "vertices": [{"id": "a", "coords": [1.5, 0], "fixed": True}],
            "edges": []}
    with pytest.raises(SchemaError) as err:
        netfile.net_from_dict(data)
    assert "coords" in err.value.field


# ---------------------------------------------------------------------------
# SVG rendering
# ---------------------------------------------------------------------------

def test_render_fermat_tree_contents():
    net = fermat_net()
    svg = render.render_svg(net)
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 3
    assert svg.count('fill="black"') == 1  # one filled (balanced) vertex
    assert svg.count("<circle") == 4


def test_render_hyperbolic_draws_boundary_circle():
    h = S.hyperbolic(-1.0)
    net = N.star_net(h, [0.3, 0.3 + 2 * math.pi / 3, 0.3 + 4 * math.pi / 3],
                     spoke_length=0.8)
    svg = render.render_svg(net)
    assert "stroke-dasharray" in svg
    # curved edges come out as sampled polylines
    assert svg.count("<polyline") == 3
    assert max(len(line.split()) for line in svg.splitlines()
               if line.startswith("<polyline")) > 10


def test_render_hemisphere_orthographic():
    net, _cen = constructions.build_hemisphere_net()
    svg = render.render_svg(net)
    assert svg.count("<polyline") == 6
    assert svg.count("<circle") == 7  # equator circle + six vertices


def test_render_imbalance_glyphs():
    net = fermat_net()
    svg = render.render_svg(net, imbalance_glyphs=True)
    assert svg.count("<line") == 3  # one glyph per unbalanced leaf


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_construct_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "fermat.json"
    assert run_cli(["construct", "fermat", "--leaves", "1,0,-0.5,0.8,-0.5,-0.8",
                    "--output", str(out)]) == 0
    capsys.readouterr()
    assert run_cli(["verify", str(out)]) == 0
    text = capsys.readouterr().out
    assert "PASS classification" in text
    assert "FAIL" not in text


def test_cli_verify_json_deterministic(tmp_path, capsys):
    out = tmp_path / "h.json"
    assert run_cli(["construct", "hemisphere", "--output", str(out), "--census"]) == 0
    capsys.readouterr()
    assert run_cli(["verify", str(out), "--report", "json"]) == 0
    first = capsys.readouterr().out
    assert run_cli(["verify", str(out), "--report", "json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert all(c["ok"] for c in payload["checks"])


def test_cli_schema_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"surface": {"kind": "flat", "curvature": 0.0}, "vertices": []}')
    assert run_cli(["verify", str(bad)]) == 2
    assert run_cli(["verify", str(tmp_path / "missing.json")]) == 2


def test_cli_relax_and_render(tmp_path, capsys):
    src = tmp_path / "tri.json"
    netfile.save(N.Net(FLAT, {
        "o": (FLAT.point(0.2, 0.1), False),
        "a": (FLAT.point(1, 0), True),
        "b": (FLAT.point(-0.5, 0.8), True),
        "c": (FLAT.point(-0.5, -0.8), True)},
        [("o", "a"), ("o", "b"), ("o", "c")]), src)
    out = tmp_path / "relaxed.json"
    assert run_cli(["relax", str(src), "--output", str(out), "--grad-tol", "1e-10"]) == 0
    capsys.readouterr()
    relaxed = netfile.load(out)
    assert N.imbalance(relaxed, "o").norm < 1e-9
    svg = tmp_path / "net.svg"
    assert run_cli(["render", str(out), "--output", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_cli_circumference_json(tmp_path, capsys):
    out = tmp_path / "f.json"
    run_cli(["construct", "fermat", "--output", str(out)])
    capsys.readouterr()
    assert run_cli(["circumference", str(out)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["closed"] is True
    assert len(payload["edges"]) == 6
    assert payload["classification"]["essentially_simple"] is True


def test_cli_search_stream(tmp_path, capsys):
    stream = tmp_path / "trials.jsonl"
    assert run_cli(["search", "--unbalanced", "2", "--trials", "8", "--seed", "5",
                    "--stream", str(stream)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["f_estimate"].get("2", 0) == 0
    lines = stream.read_text().strip().splitlines()
    assert len(lines) == 8
    assert json.loads(lines[0])["index"] == 0


def test_cli_fig2_census_output(tmp_path, capsys):
    out = tmp_path / "fig2.json"
    code = run_cli(["construct", "fig2", "--R", "2", "--r", "1", "--d", "5",
                    "-o", str(out), "--census"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_unbalanced"] == 4
    assert abs(payload["angle_zxa_deg"] - 104.0) < 1.0
    # every construction output passes verification
    assert run_cli(["verify", str(out)]) == 0


def test_cli_lemmas_turn_small(capsys):
    assert run_cli(["lemmas", "turn", "--samples", "50", "--seed", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["first_turn_violations"] == 0
    assert payload["second_turn_violations"] == 0


def test_cli_entry_point_subprocess(tmp_path):
    out = tmp_path / "h.json"
    proc = subprocess.run([sys.executable, "-m", "gnet.cli", "construct",
                           "hemisphere", "--output", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.exists()


def test_env_threads_cap(monkeypatch, capsys):
    monkeypatch.setenv("GNET_THREADS", "2")
    assert run_cli(["search", "--unbalanced", "1", "--trials", "4", "--seed", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["trials"] == 4
