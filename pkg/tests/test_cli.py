import io
import json

import pytest

from scdigraphs.cli import parse_grid, run, UsageError


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, [json.loads(line) for line in buf.getvalue().splitlines() if line.startswith("{")], buf.getvalue()


def test_exact_c11():
    code, recs, _ = call("exact", "c11", "--n", "3", "--m", "4")
    assert code == 0 and recs[0]["result"] == "9"
    assert recs[0]["config"]["argv"] == ["exact", "c11", "--n", "3", "--m", "4"]


def test_exact_rational_serialised_as_string():
    code, recs, _ = call("exact", "p-noss-mg", "--n", "4", "--m", "6")
    assert recs[0]["result"] == "517/1690"


def test_asym_lambda():
    code, recs, _ = call("asym", "lambda", "--mu", "2")
    assert code == 0 and abs(recs[0]["result"] - 1.5936242600) < 1e-6


def test_asym_record_shape():
    _, recs, _ = call("asym", "g", "--n", "1000000", "--m", "1000100")
    res = recs[0]["result"]
    assert set(res) == {"log_value", "value", "regime_flag"}
    assert res["value"] is None and res["regime_flag"] == "trusted"


def test_from_file_predicates(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("4 4\n1 2\n2 1\n3 4\n4 3\n")
    _, recs, _ = call("exact", "strongly-connected", "--from-file", str(f))
    assert recs[0]["result"] is False
    _, recs, _ = call("exact", "isolated-cycles", "--from-file", str(f))
    assert recs[0]["result"] == [["1", "2"], ["3", "4"]]
    _, recs, _ = call("exact", "event-A", "--from-file", str(f))
    assert recs[0]["result"] is False


def test_estimate_and_replay():
    code, recs, _ = call("estimate", "--event", "strongly_connected", "--n", "4", "--m", "4", "--samples", "500", "--seed", "3")
    assert code == 0
    rec = recs[0]
    assert {"event", "n", "m", "n_samples", "seed", "workers", "mean", "stderr"} <= set(rec["result"])
    code, again, _ = call("--replay", json.dumps(rec["config"]))
    assert again[0] == rec


def test_table_csv():
    code, _, text = call("table", "--n", "10:20:10", "--r", "5", "--format", "csv")
    lines = text.strip().splitlines()
    assert code == 0 and lines[0].startswith("n,r,m,")
    assert len(lines) == 3


def test_sample_is_seeded():
    a = call("sample", "g11", "--n", "5", "--m", "8", "--seed", "4")[1][0]["result"]
    b = call("sample", "g11", "--n", "5", "--m", "8", "--seed", "4")[1][0]["result"]
    assert a == b


def test_exit_codes():
    assert call("exact", "c11", "--n", "600", "--m", "700")[0] == 3
    assert call("asym", "c11", "--n", "10", "--m", "10")[0] == 3
    assert call("exact", "c11", "--n", "3")[0] == 2
    assert call("nonsense")[0] == 2
    assert call()[0] == 2


def test_verify_subset_passes():
    code, recs, _ = call("verify", "--only", "2,6,10")
    assert code == 0 and [r["criterion"] for r in recs] == [2, 6, 10]
    assert all(r["passed"] for r in recs)


def test_verify_golden_mismatch(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("p_no_simple_ss_mg_oracle m=6,method=sequences,n=4,sequences=16777216 1/2\n")
    code, recs, _ = call("verify", "--only", "3", "--golden", str(bad))
    assert code == 1 and recs[0]["passed"] is False


def test_parse_grid():
    assert parse_grid("1:7:3") == [1, 4, 7]
    assert parse_grid("5") == [5]
    with pytest.raises(UsageError):
        parse_grid("3:1")
