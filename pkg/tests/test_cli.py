import re
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from cmeasure.cli import main
from cmeasure.selftest import run_selftest

ROOT = Path(__file__).resolve().parent.parent


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


GOLDEN = [
    (["space", "parse", "--space", "nat3", "--set", "{0,2,5}"],
     "canonical\tword\tindex\tkey_position\n"
     "{0,2,5}\t110010100000000010101010000010000000101010100000100000001000101011\t37\t74\n"),
    (["space", "op", "--space", "lebesgue", "symdiff", "[0,1/3)", "[1/4,1/2)"], "[0,1/4)+[1/3,1/2)\n"),
    (["measure", "ring", "--space", "nat3", "--set", "{0,1}", "--precision", "10"],
     "ring_element\tlower\tupper\tprecision\n{0,1}\t4/3\t4/3\t10\n"),
    (["measure", "approx", "--space", "lebesgue", "--set", "[0,1/3)", "--precision", "10"],
     "value\tprecision\tbudget_used\n1/3\t10\t64\n"),
    (["metric", "dist", "--space", "lebesgue", "--kind", "frechet", "--a", "[0,1/3)", "--b", "[1/4,1/2)"],
     "metric\tlower\tupper\tprecision\nfrechet\t5/12\t5/12\t10\n"),
    (["metric", "dist", "--space", "nat3", "--kind", "dbar", "--a", "{0}", "--b", "{1}"],
     "metric\tlower\tupper\tprecision\ndbar\t5/8\t5/8\t10\n"),
    (["degrees", "demo", "--space", "nat3", "--pipeline", "ce-via-idpm", "--set", "evens",
      "--prefix", "5", "--budget", "4000"],
     "order\telement\n0\t1\n1\t3\n2\t5\n3\t7\n4\t9\n"),
]


@pytest.mark.parametrize("argv, expected", GOLDEN, ids=[" ".join(a[:2]) + f" {i}" for i, (a, _) in enumerate(GOLDEN)])
def test_golden_output(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == expected


def test_total_reaches_three_halves(capsys):
    code, out, _ = run(capsys, "measure", "total", "--space", "nat3", "--precision", "20")
    assert code == 0
    row = out.splitlines()[1].split("\t")
    assert row[0] == "nat3" and row[2] == "1572863/1048576" and row[3] == "True"


def test_cauchy_check_accepts_a_fast_sequence(capsys):
    code, out, _ = run(capsys, "metric", "cauchy-check", "--space", "lebesgue",
                       "--words", "[0,1);[0,1/2);[0,3/4)")
    assert code == 0 and out.startswith("# pairs\t3\tok\tTrue")


def test_cauchy_check_rejects_a_slow_sequence(capsys):
    code, out, _ = run(capsys, "metric", "cauchy-check", "--space", "lebesgue",
                       "--words", "[0,1);[0,1/4);[0,1)")
    assert code == 1 and "ok\tFalse" in out


# -- exit codes ------------------------------------------------------------------------


@pytest.mark.parametrize("argv, code, message", [
    (["space", "parse", "--space", "lebesgue", "--set", "[0,1"], 2, "unclosed '['"),
    (["space", "parse", "--space", "lebesgue", "--set", "[1,0)"], 2, "reversed"),
    (["measure", "approx", "--space", "nat3", "--set", "evens"], 2, "not a ring element"),
    (["mset", "translate", "--space", "nat3", "--set", "evens", "--from", "zeta+", "--to", "zeta-"],
     3, "no computable translation"),
    (["mset", "pipeline", "--space", "nat3", "--set", "evens", "--stages", "complement_minus_to_plus"], 3, ""),
    (["degrees", "demo", "--space", "lebesgue", "--pipeline", "ce", "--set", "[0,1)"], 3, ""),
    (["mset", "bound", "--space", "lebesgue", "--set", "accumulating", "--ring-elem", "[0,1)",
      "--precision", "30", "--budget", "64"], 4, "insufficient precision at budget 64"),
    (["measure", "total", "--space", "nat3", "--precision", "20", "--default-budget", "300"], 4, "within budget 300"),
])
def test_exit_codes(capsys, argv, code, message):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert message in err


def test_parse_error_points_at_the_position(capsys):
    _, _, err = run(capsys, "space", "parse", "--space", "lebesgue", "--set", "[0,1")
    lines = err.splitlines()
    assert lines[-1].strip() == "^" and lines[-2].strip() == "[0,1"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "session.ini"
    cfg.write_text("[space]\nname = nat3\n[run]\nprecision = 6\nbudget = 300\n")
    code, out, _ = run(capsys, "--config", str(cfg), "measure", "total")
    assert code == 0 and "\t95/64\tTrue\t" in out
    # flags win over the file
    code, _, err = run(capsys, "--config", str(cfg), "measure", "total", "--precision", "20")
    assert code == 4 and "budget 300" in err


@pytest.mark.parametrize("text", ["[space]\ncolour = red\n", "[run]\nbudget = lots\n", "[space]\nname = reals\n",
                                  "no header\n"])
def test_bad_config_is_exit_two(tmp_path, capsys, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    code, _, err = run(capsys, "--config", str(cfg), "measure", "total")
    assert code == 2 and err.startswith("error:")


def test_missing_config_is_exit_two(tmp_path, capsys):
    code, _, _ = run(capsys, "--config", str(tmp_path / "nope.ini"), "measure", "total")
    assert code == 2


def test_runs_are_deterministic(capsys):
    argv = ["name", "dump", "--space", "lebesgue", "--set", "[0,1/3)", "--kind", "minus", "--budget", "300"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0 and first[1].count("\n") > 5


def test_raw_dump_is_a_symbol_stream(capsys):
    code, out, _ = run(capsys, "name", "dump", "--space", "nat3", "--set", "{1}", "--budget", "200",
                       "--format", "raw")
    assert code == 0 and set(out.strip()) <= set("01/\n")


def test_large_budget_prints_huge_bounds(capsys):
    code, out, _ = run(capsys, "name", "dump", "--space", "nat3", "--set", "evens", "--budget", "20000")
    assert code == 0 and out


def test_console_script_and_broken_pipe():
    proc = subprocess.run(
        f"{shlex.quote(sys.executable)} -m cmeasure name dump --space nat3 --set evens --budget 50000 | head -1",
        shell=True, capture_output=True, text=True, timeout=600)
    assert proc.stdout.count("\n") == 1
    assert "Traceback" not in proc.stderr


# -- reports ---------------------------------------------------------------------------------


def test_limits_report(tmp_path, capsys):
    code, out, _ = run(capsys, "metric", "limits", "--space", "nat3", "--random", "5", "--seed", "3",
                       "--report", str(tmp_path))
    assert code == 0
    table = (tmp_path / "limit_bounds.tsv").read_text().splitlines()
    assert table[0].split("\t")[0] == "relation" and len(table) > 1
    assert all(line.endswith("\tok") for line in table[1:])
    assert (tmp_path / "limit_bounds.png").stat().st_size > 0
    assert "failures\t0" in out or "\t0\n" in out


def test_converge_report(tmp_path, capsys):
    code, _, _ = run(capsys, "metric", "converge", "--space", "nat3", "--set", "evens", "--count", "5",
                     "--report", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "convergence.tsv").read_text().splitlines()
    assert len(rows) >= 5
    assert (tmp_path / "convergence.png").stat().st_size > 0


# -- self test ---------------------------------------------------------------------------------


def test_selftest_passes(capsys):
    results = list(run_selftest())
    assert results and all(ok for _, ok, _ in results)
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and out.count("PASS") == len(results)


# -- README examples ---------------------------------------------------------------------------


def readme_examples():
    text = (ROOT / "README.md").read_text(encoding="utf-8")
    out = []
    for block in re.findall(r"```console\n(.*?)```", text, flags=re.S):
        cmd, expected = None, []
        for line in block.splitlines():
            if line.startswith("$ "):
                if cmd is not None:
                    out.append((cmd, expected))
                cmd, expected = line[2:], []
            elif cmd is not None:
                expected.append(line)
        if cmd is not None:
            out.append((cmd, expected))
    return [(c, e) for c, e in out if c.startswith("cmeasure ")]


@pytest.mark.parametrize("cmd, expected", readme_examples(), ids=lambda x: x if isinstance(x, str) else "")
def test_readme_example(capsys, cmd, expected):
    argv = shlex.split(cmd)[1:]
    code, out, err = run(capsys, *argv)
    shown = [line for line in expected if not line.startswith("[exit ")]
    status = [int(line[6:-1]) for line in expected if line.startswith("[exit ")]
    assert code == (status[0] if status else 0)
    assert (out + err).splitlines() == shown
