import pytest

from catmos.harness.cli import main

from conftest import SCENARIO_PATH

SCN = SCENARIO_PATH

SMALL = """\
nodes = 6
query = temp,10,50,5,6
query = temp,15,30,10,3
query = temp,5,55,20,2,3
"""


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.scn"
    p.write_text(SMALL)
    return p


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("argv", [
    ["run", "--scenario", "{small}", "--seeds", "1-2", "--out", "{out}"],
    ["tables", "--out", "{out}"],
    ["merge-demo", "--scenario", SCN, "--out", "{out}"],
])
def test_commands_deterministic(tmp_path, small, argv, capsys):
    results = []
    for k in (1, 2):
        out = tmp_path / f"o{k}"
        assert main([a.format(small=small, out=out) for a in argv]) == 0
        results.append(outputs(out))
    assert results[0] == results[1] and results[0]


def test_run_prints_reference(small, tmp_path, capsys):
    assert main(["run", "--scenario", str(small), "--seed", "4", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "seed 4:" in out and "10.29%" in out


def test_compress(tmp_path, capsys):
    f = tmp_path / "q.txt"
    text = (b"SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 "
            b"SAMPLE PERIOD 5 FOR 100 EPOCHS")
    f.write_bytes(text)
    assert main(["compress", "--codec", "huffman", "--in", str(f)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == f"original_bytes={len(text)}"
    assert main(["compress", "--codec", "deflate", "--in", str(f), "--mode",
                 "self-contained"]) == 0
    assert float(capsys.readouterr().out.splitlines()[2].split("=")[1]) > 100


def test_merge_demo_prints_decisions(capsys):
    assert main(["merge-demo", "--scenario", SCN]) == 0
    out = capsys.readouterr().out
    assert "query 3: cache-answered" in out and "query 4: merged" in out


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("query = temp,50,10,5,100\n")
    assert main(["run", "--scenario", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["compress", "--codec", "lzw", "--in", str(tmp_path / "missing")]) == 2
    empty = tmp_path / "empty"
    empty.write_bytes(b"")
    assert main(["compress", "--codec", "lzw", "--in", str(empty)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code != 0
