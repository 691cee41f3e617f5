import json

from fcslab import cli, serialize, fixtures


def run(argv):
    return cli.main(argv)


def test_analyze_fixture_ok(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run(["analyze", "fixture:bernoulli-uniform", "-o", str(out)])
    assert code == cli.EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["is_pure"] is True
    assert "provenance" in doc and "input_sha256" in doc["provenance"]
    summary = capsys.readouterr().err
    assert "certificate chain" in summary


def test_analyze_stdout_json(capsys):
    code = run(["analyze", "fixture:bernoulli-basis", "--no-amalgam"])
    assert code == cli.EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["is_pure"] is True
    assert "twosided" not in doc


def test_analyze_includes_twosided_block(tmp_path):
    out = tmp_path / "r.json"
    code = run(["analyze", "fixture:aklt", "--level", "2", "-o", str(out)])
    assert code == cli.EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["twosided"]["level"] == 2
    assert doc["twosided"]["moment_deviation"] < 1e-8


def test_analyze_file_input(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(serialize.dumps_system(fixtures.period_two()))
    code = run(["analyze", str(path), "--no-amalgam", "-o",
                str(tmp_path / "out.json")])
    assert code == cli.EXIT_OK


def test_seed_override(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(["analyze", "fixture:random", "--seed", "5", "--no-amalgam",
                "-o", str(a)]) == cli.EXIT_OK
    assert run(["analyze", "fixture:random-seeded:5", "--no-amalgam",
                "-o", str(b)]) == cli.EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["analyze", str(bad)]) == cli.EXIT_PARSE
    assert run(["analyze", "fixture:no-such-thing"]) == cli.EXIT_PARSE
    capsys.readouterr()


def test_validation_error_exit_code(tmp_path, capsys):
    doc = serialize.system_to_dict(fixtures.aklt())
    doc["v"][0][0][0] = [5.0, 0.0]
    bad = tmp_path / "defect.json"
    bad.write_text(json.dumps(doc))
    assert run(["analyze", str(bad)]) == cli.EXIT_VALIDATION
    capsys.readouterr()


def test_fixture_subcommand(capsys):
    assert run(["fixture", "aklt"]) == cli.EXIT_OK
    text = capsys.readouterr().out
    sys_, _, meta = serialize.loads_system(text)
    assert sys_.d == 3 and meta["name"] == "aklt"


def test_moments_subcommand(capsys):
    assert run(["moments", "fixture:aklt", "--max-len", "2"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "I=(0) J=(0)" in out


def test_determinism(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(["analyze", "fixture:aklt", "--level", "2", "-o", str(a)])
    run(["analyze", "fixture:aklt", "--level", "2", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()
