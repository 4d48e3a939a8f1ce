from fractions import Fraction

import pytest

from scdigraphs import golden


def test_roundtrip_and_refusal(tmp_path):
    path = tmp_path / "g.txt"
    rec = golden.GoldenRecord("op", {"n": 3, "m": 4}, Fraction(1, 3))
    golden.store(rec, path)
    assert golden.lookup("op", {"m": 4, "n": 3}, path) == Fraction(1, 3)
    assert path.read_text().splitlines()[-1] == "op m=4,n=3 1/3"
    golden.store(rec, path)  # same value is a no-op
    with pytest.raises(golden.GoldenMismatch):
        golden.store(golden.GoldenRecord("op", {"n": 3, "m": 4}, Fraction(1, 2)), path)
    golden.store(golden.GoldenRecord("op", {"n": 3, "m": 4}, Fraction(1, 2)), path, overwrite=True)
    assert golden.check("op", {"n": 3, "m": 4}, Fraction(1, 2), path)


def test_env_var_selects_store(tmp_path, monkeypatch):
    path = tmp_path / "env.txt"
    monkeypatch.setenv(golden.ENV_VAR, str(path))
    assert golden.default_path() == path
    golden.store(golden.GoldenRecord("x", {}, Fraction(7)), None)
    assert golden.lookup("x", {}) == 7


def test_missing_record_raises(tmp_path):
    with pytest.raises(KeyError):
        golden.check("nothing", {"n": 1}, Fraction(0), tmp_path / "none.txt")


def test_packaged_store_has_exhaustive_value():
    params = {"n": 4, "m": 6, "method": "sequences", "sequences": 16**6}
    assert golden.lookup("p_no_simple_ss_mg_oracle", params, golden.PACKAGE_STORE) == Fraction(517, 1690)
