import json
import pathlib

import pytest

from sumprod.cli import parse_set, run
from sumprod.core import make_field

DATA = pathlib.Path(__file__).parent / "data"

# Golden invocations pin the serialized schema of every report type.
GOLDEN_CASES = {
    "set_sum.json": ["set", "--p", "7", "--a", "1,2", "--b", "3,5", "--op", "sum"],
    "energy_add.json": ["energy", "--p", "5", "--y", "0,1", "--z", "0,1", "--kind", "add"],
    "lemma_cover.json": ["lemma", "cover", "--p", "13", "--b1", "ap:0,1,6", "--b2", "0,1"],
    "lemma_chang.json": ["lemma", "chang", "--p", "7", "--y", "1,2,4", "--z", "1,2,4"],
    "lemma_gk.json": ["lemma", "gk", "--p", "7", "--a", "1,2"],
    "chain_t11.json": ["chain", "--theorem", "1.1", "--p", "7", "--a", "1,2,3", "--sign", "plus"],
    "chain_prop51.json": ["chain", "--theorem", "prop51", "--p", "7", "--a", "1,2,3", "--b", "1,2"],
    "chain_t11.csv": ["chain", "--theorem", "1.1", "--p", "7", "--a", "1,2,3", "--format", "csv"],
    "extremal.json": ["extremal", "--p", "7", "--n", "2", "--threads", "1"],
    "scan_ratio.json": ["scan-ratio", "--p", "7"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name, capsys):
    assert run(GOLDEN_CASES[name]) == 0
    out = capsys.readouterr().out
    assert out == (DATA / "golden" / name).read_text()


class TestParseSet:
    def test_literal(self):
        f = make_field(7)
        assert sorted(parse_set("1,2,9", f)) == [1, 2]

    def test_arithmetic_progression(self):
        f = make_field(13)
        assert sorted(parse_set("ap:1,3,4", f)) == [1, 4, 7, 10]

    def test_geometric_progression(self):
        f = make_field(7)
        assert sorted(parse_set("gp:1,3,3", f)) == [1, 2, 3]

    def test_file(self, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text("1\n2  # a comment\n# whole-line comment\n\n3\n")
        assert sorted(parse_set(f"@{path}", make_field(7))) == [1, 2, 3]

    def test_bad_specs(self):
        from sumprod.cli import UsageError

        f = make_field(7)
        for spec in ("1,x", "ap:1,2", "gp:1,7,3", "@/nonexistent-file", "ap:0,1,0"):
            with pytest.raises(UsageError):
                parse_set(spec, f)


class TestExitCodes:
    def test_success(self, capsys):
        assert run(["set", "--p", "7", "--a", "1", "--op", "ratio", "--b", "1"]) == 2
        assert run(["energy", "--p", "5", "--y", "0,1", "--z", "0,1", "--kind", "add"]) == 0
        capsys.readouterr()

    def test_violation_is_one(self, capsys):
        # the multiplicative floor genuinely fails when 0 is in the set
        assert run(["energy", "--p", "5", "--y", "0", "--z", "0,1", "--kind", "mult"]) == 1
        capsys.readouterr()

    def test_usage_is_two(self, capsys):
        assert run(["set", "--p", "6", "--a", "1", "--op", "ratio"]) == 2
        assert run(["set", "--p", "7", "--a", "1,2", "--op", "sum"]) == 2  # missing --b
        assert run(["nonsense"]) == 2
        capsys.readouterr()

    def test_guard_is_three(self, capsys, monkeypatch):
        monkeypatch.delenv("SPW_GUARD_OVERRIDE", raising=False)
        args = ["lemma", "katzshen", "--p", "17", "--b0", "ap:0,1,16", "--bs", "0,1",
                "--eps", "1/4"]
        assert run(args) == 3
        monkeypatch.setenv("SPW_GUARD_OVERRIDE", "1")
        assert run(args) == 0
        capsys.readouterr()


class TestFormats:
    def test_csv_scan(self, capsys):
        assert run(["scan-ratio", "--p", "7", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,proper_exists,witness"
        assert len(lines) == 4  # header + n=1,2,3

    def test_text_chain(self, capsys):
        assert run(["chain", "--theorem", "remark", "--p", "7", "--a", "1,2",
                    "--format", "text"]) == 0
        out = capsys.readouterr().out
        assert "theorem: REMARK" in out
        assert "[diag]" in out

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "report.json"
        assert run(["set", "--p", "7", "--a", "1,2", "--b", "3,5", "--op", "sum",
                    "--out", str(dest)]) == 0
        assert capsys.readouterr().out == ""
        payload = json.loads(dest.read_text())
        assert payload["elements"] == [0, 4, 5, 6]

    def test_fractions_serialized_as_num_den(self, capsys):
        assert run(["lemma", "cover", "--p", "13", "--b1", "ap:0,1,6", "--b2", "0,1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["ratio_k"] == {"num": 7, "den": 2}


def test_byte_identical_repeat(capsys):
    argv = ["chain", "--theorem", "1.4", "--p", "11", "--a", "1,2,3,4", "--b", "1,2"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_seed_flows_to_anneal(capsys):
    argv = ["extremal", "--p", "13", "--n", "3", "--mode", "anneal", "--iters", "60"]
    assert run(argv + ["--seed", "5"]) == 0
    with_seed = capsys.readouterr().out
    assert run(argv + ["--seed", "5"]) == 0
    assert capsys.readouterr().out == with_seed
    assert json.loads(with_seed)["seed"] == 5
    # default seed is 0, never wall-clock
    assert run(argv) == 0
    default_out = capsys.readouterr().out
    assert json.loads(default_out)["seed"] == 0


def test_rep_subcommand(capsys):
    assert run(["set", "--p", "5", "--a", "1,2", "--b", "1,2", "--op", "rep",
                "--sign", "minus"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["counts"] == [2, 1, 0, 0, 1]
