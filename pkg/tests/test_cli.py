import json

import pytest

from fdcolor.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_oracle_path_two(capsys):
    code, out, _ = run(capsys, "oracle", "--topology", "path", "--n", "2", "--q", "4")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 12
    assert all(line.endswith(" 1/12") for line in lines)


def test_oracle_single_site(capsys):
    code, out, _ = run(capsys, "oracle", "--topology", "path", "--n", "1", "--q", "3")
    assert code == 0 and out == "1 1/3\n2 1/3\n3 1/3\n"


def test_oracle_caps(capsys):
    assert run(capsys, "oracle", "--topology", "cycle", "--n", "2")[0] == 4
    assert run(capsys, "oracle", "--topology", "path", "--n", "12", "--q", "3")[0] == 4
    assert run(capsys, "oracle", "--topology", "path", "--n", "0")[0] == 2


def test_sample_document(capsys):
    code, out, _ = run(capsys, "sample", "--gen", "path:5", "--variant", "fiid", "--seed", "7")
    doc = json.loads(out)
    assert code == 0
    assert doc["seed"] == 7 and doc["proper"] is True
    assert len(doc["vertices"]) == 5
    assert all(v["flat"] < 4 ** 3 for v in doc["vertices"])


def test_sample_edge_file_records_seed(capsys, tmp_path, monkeypatch):
    path = tmp_path / "g.txt"
    path.write_text("a b\nb c\nc a\n")
    monkeypatch.setenv("FDCOLOR_SEED", "42")
    code, out, _ = run(capsys, "sample", "--edges", str(path), "--variant", "invariant")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 42
    assert [v["label"] for v in doc["vertices"]] == ["a", "b", "c"]


def test_sample_bad_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nb\n")
    assert run(capsys, "sample", "--edges", str(bad))[0] == 2
    assert run(capsys, "sample", "--edges", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "sample", "--gen", "cycle:2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["sample"])
    assert exc.value.code == 2


def test_sample_digraph_dump(capsys, tmp_path):
    dump = tmp_path / "d.txt"
    run(capsys, "sample", "--gen", "cycle:5", "--variant", "fiid", "--dump-digraph", str(dump))
    text = dump.read_text()
    assert text.startswith("# level 2\n") and "->" in text


def test_verify_exact_pass(capsys):
    code, out, _ = run(capsys, "verify", "--gen", "cycle:3", "--variant", "invariant", "--k", "2", "--exact")
    assert code == 0 and json.loads(out)["verdict"] == "PASS"


def test_verify_exact_over_cap(capsys):
    code, _, err = run(capsys, "verify", "--gen", "path:9", "--variant", "fiid", "--k", "4", "--exact")
    assert code == 4 and "--mc" in err


def test_verify_mc_fail_at_zero(capsys):
    code, out, _ = run(capsys, "verify", "--gen", "path:8", "--variant", "fiid", "--k", "0", "--mc")
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] == "FAIL" and doc["trials"] == 10000


def test_generate_round_trip(capsys, tmp_path):
    out = tmp_path / "t.txt"
    assert run(capsys, "generate", "--gen", "torus:3x3", "--out", str(out))[0] == 0
    code, text, _ = run(capsys, "sample", "--edges", str(out), "--seed", "1")
    assert code == 0 and json.loads(text)["graph"]["edges"] == 18


def test_replay_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        run(capsys, "sample", "--gen", "random_regular:20:3", "--seed", "5", "--out", str(target))
    assert a.read_bytes() == b.read_bytes()
