import hashlib
import subprocess
import sys

import pytest

from markovspec.cli import DATA, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def verdict_sections(text: str) -> str:
    return "\n".join(l for l in text.splitlines() if not l.startswith("time:"))


@pytest.mark.parametrize("word, digits, expected", [
    ("<1*>", 8, "2.2360679…"),
    ("<2*>", 8, "2.8284271…"),
    ("<121313>22344*3211<313121>", 12, "4.52782956616…"),
])
def test_eval(capsys, word, digits, expected):
    code, out, _ = run(capsys, "eval", word, "--digits", str(digits))
    assert code == 0 and f"= {expected}" in out


def test_eval_exact_forms(capsys):
    assert "2*√2" in run(capsys, "eval", "<2*>", "--exact")[1]
    assert "√5" in run(capsys, "eval", "<1*>", "--exact")[1]


@pytest.mark.parametrize("word, expected", [
    ("<12>3*113<21>", "3.930691"),
    ("<1112*12>", "3.35871"),
    ("<1222*12212221>", "3.122183"),
])
def test_markov(capsys, word, expected):
    code, out, _ = run(capsys, "markov", word)
    assert code == 0 and f"= {expected}" in out
    assert "attained at: the mark" in out


def test_markov_off_mark(capsys):
    out = run(capsys, "markov", "<3>1*<2>")[1]
    assert "position -1 from the mark" in out


def test_transitive_with_witnesses(capsys):
    code, out, _ = run(capsys, "transitive", "datasets/B_121_212.fset")
    assert code == 0 and "transitive: true" in out
    assert "121: 12 2 1^inf" in out


def test_extremal(capsys):
    code, out, _ = run(capsys, "extremal", "datasets/B_121_212.fset", "--max", "--digits", "10")
    assert code == 0 and "max m = 3.050816157" in out and "witness:" in out


def test_certify_good_interval(capsys):
    code, out, _ = run(capsys, "certify", "good-interval", "certs/3_05-3_12.cert")
    assert code == 0 and "verdict: PASS" in out
    assert "FAIL" not in out


def test_certify_gap_and_negative_control(capsys):
    code, out, _ = run(capsys, "certify", "gap", "certs/gap1.cert")
    assert code == 0 and "verdict: PASS" in out
    code, out, _ = run(capsys, "certify", "gap", "certs/hall-ray-negative.cert")
    assert code == 1 and "verdict: FAIL" in out and "witness: m(<" in out


def test_certify_local_uniqueness(capsys):
    code, out, _ = run(capsys, "certify", "local-uniqueness", "datasets/w3942.toml")
    assert code == 0 and "replay: 0 discrepancies" in out


def test_mlregion(capsys):
    code, out, _ = run(capsys, "mlregion", "datasets/w3942.toml", "--no-certified")
    assert code == 0
    assert "j0 = 3.942001159911341469213548" in out
    assert sum(line.startswith("X") for line in out.splitlines()) == 6


def test_dim(capsys):
    code, out, _ = run(capsys, "dim", "datasets/sigmaA_394.fset", "--depth", "6")
    assert code == 0 and "dim_H K in [" in out
    code, out, _ = run(capsys, "dim", "datasets/sigmaA_394.fset", "--depth", "6", "--fast")
    assert code == 0 and "fast mode" in out and "not certified" in out


def test_berstein(capsys):
    code, out, _ = run(capsys, "berstein")
    assert code == 0
    assert sum(line.startswith("(") for line in out.splitlines()) == 23


def test_reports_carry_input_digests(capsys):
    out = run(capsys, "transitive", "datasets/B_121_212.fset")[1]
    h = hashlib.sha256((DATA / "datasets" / "B_121_212.fset").read_bytes()).hexdigest()
    assert f"input: datasets/B_121_212.fset sha256={h}" in out


def test_verdict_sections_are_deterministic(capsys):
    args = ("certify", "gap", "certs/gap3.cert", "certs/hall-ray-negative.cert")
    one = run(capsys, *args)
    two = run(capsys, "--jobs", "2", *args)
    assert one[0] == two[0] == 1  # the negative control fails
    assert verdict_sections(one[1]) == verdict_sections(two[1])
    assert verdict_sections(one[1]) == verdict_sections(run(capsys, *args)[1])


@pytest.mark.parametrize("argv", [
    ["eval", "12"],                       # no mark
    ["markov", "12*3"],                   # not doubly periodic
    ["certify", "gap", "nope.cert"],      # missing file
    ["dim"],                              # nothing to measure
])
def test_usage_errors_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_unknown_command_exits_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frob"])
    assert exc.value.code == 3


def test_format_errors_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.cert"
    bad.write_text("[meta]\nname = g\nalphabet = 3\n[nu]\n<1*>\n[mu]\n<2**>\n")
    code, _, err = run(capsys, "certify", "gap", str(bad))
    assert code == 3 and ":7:" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "markovspec", "eval", "<1*>", "--digits", "5"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "2.2360" in r.stdout
