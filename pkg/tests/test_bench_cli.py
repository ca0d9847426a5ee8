import csv
import io

import pytest

from internlog import cli
from internlog.bench import CSV_COLUMNS, BenchRow, bench, emit_csv, epal_input, find_probes, islist_input, lr_input

ISLIST_PL = ":- table islist/1 as intern.\nislist([]).\nislist([_|L]) :- islist(L).\n"


def _fields(row):
    return [getattr(row, c) for c in CSV_COLUMNS if c != "cpu_ms"] + [row.detail]


@pytest.mark.parametrize("name,n,mode", [("islist", 60, "plain"), ("epal", 200, "intern"), ("lr", 100, "intern")])
def test_deterministic_for_seed(name, n, mode):
    assert _fields(bench(name, n, mode, seed=5)) == _fields(bench(name, n, mode, seed=5))


def test_generators():
    xs = islist_input(100, 1)
    assert len(set(xs)) == 100
    ep = epal_input(200, 1)
    assert ep == ep[::-1] and len(ep) == 200 and all(1 <= v <= 10**7 for v in ep)
    assert set(lr_input(300, 1)) <= {1, 2, 3}
    assert all(k % 2 == 1 for k in find_probes())
    assert islist_input(100, 1) == xs and islist_input(100, 2) != xs


def test_islist_plain_ratio():
    r100 = bench("islist", 100, "plain")
    r200 = bench("islist", 200, "plain")
    s100 = r100.detail["symbols_inserted"]
    s200 = r200.detail["symbols_inserted"]
    assert s100 == 101**2 and s200 == 201**2
    assert s200 / s100 == pytest.approx(3.96, abs=0.005)


@pytest.mark.parametrize("n", [1, 10, 150])
def test_islist_intern_counts(n):
    r = bench("islist", n, "intern")
    assert r.result == "recognized"
    assert r.intern_records == n
    assert r.detail["call_entries"] == n + 1


def test_epal_and_lr_recognized():
    assert bench("epal", 200, "intern").result == "recognized"
    assert bench("lr", 800, "intern").result == "recognized"
    assert bench("lr", 10, "intern", items=[1, 4, 2]).result == "rejected"


def test_find_large_all_rejected():
    r = bench("find", 500_000, "intern", probes=100)
    assert r.result == "rejected"
    assert r.detail["rejected"] == 100 and r.detail["found"] == 0


def test_budget_gives_xx_row():
    r = bench("islist", 100, "plain", max_table_nodes=500)
    assert r.trie_nodes == "xx" and r.result == "xx"
    lines = emit_csv([r]).splitlines()
    assert lines[1].split(",")[3:] == ["xx"] * 6


def test_bench_argument_errors():
    with pytest.raises(ValueError):
        bench("nope", 10)
    with pytest.raises(ValueError):
        bench("islist", 0)
    with pytest.raises(ValueError):
        bench("islist", 5, "fast")


def test_csv_shapes():
    assert emit_csv([]) == ",".join(CSV_COLUMNS) + "\n"
    r = BenchRow("islist", 3, "intern", 1.5, 4, 128, 3, 100, "recognized")
    text = emit_csv([r])
    assert len(text.splitlines()) == 2
    (rec,) = list(csv.DictReader(io.StringIO(text)))
    assert rec["intern_records"] == "3" and rec["result"] == "recognized"


def test_intern_list_bench():
    r = bench("intern_list", 1000, "intern")
    assert r.intern_records == 1000
    assert bench("intern_list", 1000, "plain").intern_records == 0


@pytest.fixture
def islist_file(tmp_path):
    p = tmp_path / "islist.pl"
    p.write_text(ISLIST_PL)
    return str(p)


def test_cli_run_yes(islist_file, capsys):
    assert cli.main(["run", islist_file, "--query", "islist([1,2,3])"]) == 0
    assert capsys.readouterr().out.strip() == "yes"


def test_cli_run_no(islist_file, capsys):
    assert cli.main(["run", islist_file, "--query", "islist([1|foo])"]) == 1


def test_cli_run_bindings_and_stats(tmp_path, capsys):
    p = tmp_path / "p.pl"
    p.write_text("q(1).\nq(2).\n")
    assert cli.main(["run", str(p), "--query", "q(X)", "--stats"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:2] == ["X = 1", "X = 2"]
    assert out[2].startswith("% ")


def test_cli_missing_file(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "none.pl"), "--query", "true"]) == 2
    assert capsys.readouterr().err


def test_cli_parse_error(islist_file, capsys):
    assert cli.main(["run", islist_file, "--query", "islist(["]) == 2


def test_cli_bench_csv(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    assert cli.main(["bench", "islist", "--n", "20", "--mode", "intern", "--csv", str(out)]) == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert out.read_text() == printed
