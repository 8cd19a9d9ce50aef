import json

import pytest

from _support import BENCH, MANIFEST
from seuguard.cli import main

MOTIV = str(BENCH / "motivating_example.ctl")
MOTIV_ARGS = [MOTIV, "--domain", "x=0..20", "--domain", "y=0..20", "--unwind", "8"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", *MOTIV_ARGS, "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert (d["T"], d["S"], d["M"], d["eta_text"]) == (5, 4, 1, "25%")
    assert d["crv"] == ["x", "output", "count"]


def test_analyze_single_var_table(capsys):
    code, out, _ = run(capsys, "analyze", *MOTIV_ARGS, "--var", "y")
    assert code == 0 and "NonCrv" in out


def test_analyze_csv(capsys):
    code, out, _ = run(capsys, "analyze", *MOTIV_ARGS, "--var", "x", "--format", "csv")
    assert code == 0 and out.startswith("kind,program,variable")


def test_differential_small(capsys):
    code, out, _ = run(capsys, "analyze", MOTIV, "--domain", "x=9..12", "--domain", "y=0..1",
                       "--unwind", "8", "--differential", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["mismatch_count"] == 0 and all(v["agree"] for v in d["variables"])


def test_oracle_engine(capsys):
    code, out, _ = run(capsys, "analyze", MOTIV, "--domain", "x=9..12", "--domain", "y=0..1",
                       "--unwind", "8", "--oracle", "--var", "x", "--format", "json")
    assert code == 0 and json.loads(out)["variables"][0]["engine"] == "oracle"


@pytest.mark.parametrize("flag,needle", [
    ("--emit-cfg", "digraph"),
    ("--emit-pdg", "digraph"),
    ("--emit-slice", "alarm"),
])
def test_emit_flags(capsys, flag, needle):
    code, out, _ = run(capsys, "analyze", MOTIV, flag)
    assert code == 0 and needle in out


def test_emit_instrumented(capsys):
    code, out, _ = run(capsys, "analyze", MOTIV, "--emit-instrumented", "--var", "count")
    assert code == 0 and "count" in out
    code, _, err = run(capsys, "analyze", MOTIV, "--emit-instrumented")
    assert code == 1 and "--var" in err


def test_vars(capsys):
    code, out, _ = run(capsys, "vars", MOTIV)
    assert code == 0 and out.split() == ["x", "y", "output", "alarm", "count"]


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "analyze", str(tmp_path / "missing.ctl"))[0] == 1
    assert run(capsys, "analyze", *MOTIV_ARGS, "--unwind", "0")[0] == 1
    assert run(capsys, "analyze", *MOTIV_ARGS, "--fault-bits", "0..40")[0] == 1
    assert run(capsys, "analyze", *MOTIV_ARGS, "--var", "nope")[0] == 1
    assert run(capsys, "analyze", MOTIV, "--domain", "zz=0..3")[0] == 1
    assert run(capsys, "analyze", MOTIV, "--domain", "x=5")[0] == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.ctl"
    bad.write_text("int f( { return 1; }\n")
    code, _, err = run(capsys, "analyze", str(bad), "--property", "always o <= 1")
    assert code == 2 and "bad.ctl:1:" in err


def test_property_error_exit(capsys):
    assert run(capsys, "analyze", MOTIV, "--property", "always output <=")[0] == 2
    assert run(capsys, "analyze", MOTIV, "--property", "always nothing <= 3")[0] == 2


def test_missing_sidecar(capsys, tmp_path):
    src = tmp_path / "p.ctl"
    src.write_text("int f(int a) { int o = a; return o; }\n")
    assert run(capsys, "analyze", str(src))[0] == 2
    (tmp_path / "p.prop").write_text("always o <= 3\n")
    assert run(capsys, "analyze", str(src), "--domain", "a=0..3")[0] == 0


def test_unknown_exit(capsys, tmp_path):
    src = tmp_path / "loop.ctl"
    src.write_text("int f(int a) { int o = 0; while (o < a) { o = o + 1; } return o; }\n")
    code, out, _ = run(capsys, "analyze", str(src), "-p", "always o <= 100", "--domain", "a=5..6",
                       "--unwind", "2", "--var", "a")
    assert code == 3


def test_bench_check(capsys):
    code, out, _ = run(capsys, "bench", "--manifest", str(MANIFEST), "--check")
    assert code == 0
    assert "Motivating Example" in out and "25%" in out and "50%" in out


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
