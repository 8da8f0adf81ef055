import json
import subprocess
import sys

import pytest

from matroid_operads import cli


def call(capsys, *argv):
    rc = cli.run(list(argv))
    out = capsys.readouterr().out
    return rc, out


def call_json(capsys, *argv):
    rc, out = call(capsys, *argv)
    return rc, json.loads(out)


def test_fy_hilbert(capsys):
    rc, out = call_json(capsys, "fy", "--family", "partition:3", "--building", "minimal", "--hilbert")
    assert rc == 0 and out == {"hilbert": [1, 1]}


def test_koszul_p3(capsys):
    rc, out = call_json(capsys, "koszul", "--family", "partition:3", "--building", "minimal")
    assert rc == 0
    assert out["homology"] == [1, 2] and out["koszul"] is True


def test_koszul_affine(capsys):
    rc, out = call_json(capsys, "koszul", "--family", "boolean:3", "--building", "maximal",
                        "--variant", "affine")
    assert rc == 0 and out["homology"] == [1, 3, 3, 1]


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["fy", "--family", "partition:3", "--bogus"])
    assert exc.value.code == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "usage"


@pytest.mark.parametrize("argv", [
    ["fy", "--hilbert"],
    ["fy", "--family", "partition:3", "--lattice", "x.json"],
    ["fy", "--family", "banana:3"],
    ["fy", "--family", "partition:x"],
    ["fy", "--family", "partition:3", "--atom-order", "0,0,1"],
    ["fy", "--family", "partition:3", "--atom-order", "a,b"],
    ["fy", "--family", "partition:3", "--building", "missing.json"],
    ["koszul", "--family", "boolean:2"],
])
def test_bad_input_exits_2(capsys, argv):
    rc, out = call_json(capsys, *argv)
    assert rc == 2 and "error" in out


def test_building_file_not_building_set(capsys, tmp_path):
    f = tmp_path / "b.json"
    # in Pi_3 the top is not a member, so this is not a building set
    f.write_text(json.dumps({"members": [[[1, 2]], [[1, 3]]]}))
    rc, out = call_json(capsys, "fy", "--family", "partition:3", "--building", str(f))
    assert rc == 2 and "error" in out


def test_lattice_from_graph_file(capsys, tmp_path):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"vertices": [1, 2, 3], "edges": [[1, 2], [2, 3], [1, 3]]}))
    rc, a = call_json(capsys, "fy", "--lattice", str(f), "--hilbert")
    rc2, b = call_json(capsys, "fy", "--family", "partition:3", "--hilbert")
    assert rc == rc2 == 0 and a == b


def test_atom_order_does_not_change_fy(capsys):
    _, a = call_json(capsys, "fy", "--family", "partition:4", "--hilbert")
    _, b = call_json(capsys, "fy", "--family", "partition:4", "--hilbert", "--atom-order", "5,4,3,2,1,0")
    assert a == b == {"hilbert": [1, 5, 1]}


def test_seed_does_not_change_output(capsys):
    _, a = call(capsys, "groebner-check", "--family", "partition:4", "--seed", "1")
    _, b = call(capsys, "groebner-check", "--family", "partition:4", "--seed", "99")
    assert a == b


def test_groebner_check(capsys):
    rc, out = call_json(capsys, "groebner-check", "--family", "partition:4")
    assert rc == 0 and out["pass"] is True
    assert all(o["verdict"] for o in out["orders"])


def test_operad_check(capsys):
    rc, out = call_json(capsys, "operad-check", "--family", "partition:3")
    assert rc == 0 and out["pass"] is True


def test_other_commands_run(capsys):
    for argv in (["lattice", "--family", "cycle:4"], ["building-sets", "--family", "boolean:3", "--all"],
                 ["nested", "--family", "partition:4", "--irreducible", "--laws"],
                 ["os", "--family", "partition:4", "--hilbert", "--projective"],
                 ["fy", "--family", "path:4", "--building", "tubes", "--basis", "--pairing", "--oracle"]):
        rc, out = call_json(capsys, *argv)
        assert rc == 0, (argv, out)


def test_cache_is_identical(capsys, tmp_path):
    argv = ["koszul", "--family", "partition:4", "--cache", str(tmp_path)]
    _, fresh = call(capsys, *argv)
    assert len(list(tmp_path.iterdir())) == 1
    _, cached = call(capsys, *argv)
    assert fresh == cached
    # different options get a different key
    call(capsys, *argv, "--variant", "affine")
    assert len(list(tmp_path.iterdir())) == 2


def test_cache_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    call(capsys, "fy", "--family", "boolean:3", "--hilbert")
    assert len(list(tmp_path.iterdir())) == 1


def test_catalog_isolates_bad_entry(capsys, tmp_path):
    f = tmp_path / "cat.json"
    f.write_text(json.dumps([
        {"name": "good", "family": "partition:3", "building": "minimal"},
        {"name": "bad", "family": "partition:3", "building": "explicit", "members": [[[1, 2]]]},
    ]))
    rc, out = call_json(capsys, "catalog", "--catalog", str(f), "--only", "fy,pd")
    assert rc == 1
    assert out["failed"] == ["bad"]
    good = out["entries"][0]
    assert good["pass"] and set(good["checks"]) == {"fy", "pd"}


def test_catalog_unknown_check(capsys):
    rc, out = call_json(capsys, "catalog", "--only", "nope")
    assert rc == 2


def test_catalog_pretty(capsys, tmp_path):
    f = tmp_path / "cat.json"
    f.write_text(json.dumps({"entries": [{"name": "b2", "family": "boolean:2", "building": "maximal"}]}))
    rc, out = call(capsys, "catalog", "--catalog", str(f), "--only", "fy", "--pretty")
    assert rc == 0
    assert out.splitlines()[0].split() == ["entry", "fy"]
    assert "all checks passed" in out


def test_pretty_plain(capsys):
    rc, out = call(capsys, "fy", "--family", "partition:3", "--hilbert", "--pretty")
    assert rc == 0 and out.strip() == "hilbert: [1, 1]"


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "matroid_operads.cli", "fy", "--family", "boolean:2",
                          "--building", "maximal", "--hilbert"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout) == {"hilbert": [1, 1]}
