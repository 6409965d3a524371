import csv
import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpat import __version__
from mpat.cli import EXIT_FAILED, EXIT_GUARD, EXIT_OK, EXIT_USAGE, main
from mpat.cli import suites
from mpat.cli.cache import ENV_VAR, ResultCache, resolve_cache_dir
from mpat.cli.formats import (
    FormatError,
    family_hash,
    load_family,
    parse_family,
    parse_pattern,
    serialize_family,
    serialize_pattern,
)
from mpat.constructions import Family, family_pkr
from mpat.tensor import Tensor01, make_tensor

from strategies import tensors

I2_TEXT = "dims: 2 2\nones:\n1 1\n2 2\n"
I2 = make_tensor([2, 2], [(1, 1), (2, 2)])
DIAG1 = make_tensor([2, 2, 2], [(1, 1, 1), (1, 2, 1), (2, 1, 2), (2, 2, 2)])


@pytest.fixture(autouse=True)
def no_env_cache(monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# pattern text format


def test_parse_examples():
    assert parse_pattern(I2_TEXT) == I2
    assert parse_pattern("dims: 2 2 2\nones:\n1 1 1\n1 2 1\n2 1 2\n2 2 2\n") == DIAG1
    assert parse_pattern("dims: 3 1\nones:\n") == Tensor01.zeros((3, 1))


def test_serialize_examples():
    assert serialize_pattern(I2) == I2_TEXT
    assert serialize_pattern(Tensor01.zeros((3, 1))) == "dims: 3 1\nones:\n"


@given(tensors(max_d=4))
def test_round_trip(t):
    assert parse_pattern(serialize_pattern(t)) == t


@given(tensors(max_d=3), st.randoms())
def test_canonicalizes_shuffled_input(t, rnd):
    ones = [" ".join(map(str, c)) for c in t.ones()]
    rnd.shuffle(ones)
    text = "dims:  " + "  ".join(map(str, t.dims)) + "\n\nones:\n" + "\n".join("  " + o for o in ones) + "\n"
    assert serialize_pattern(parse_pattern(text)) == serialize_pattern(t)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, 1),
        ("size: 2 2\nones:\n", 1, 1),
        ("dims: 2 x\nones:\n", 1, 9),
        ("dims: 2 2\n1 1\n", 2, 1),
        ("dims: 2 2\nones:\n1 3\n", 3, 3),
        ("dims: 2 2\nones:\n3 3\n", 3, 1),
        ("dims: 2 2\nones:\n1 1\n2 22\n", 4, 3),
        ("dims: 2 2 2\nones:\n2 2 x2\n", 3, 5),
        ("dims: 2 2\nones:\n1 1\n1 1\n", 4, 1),
        ("dims: 2 2\nones:\n1 1 1\n", 3, 1),
        ("dims: 0 2\nones:\n", 1, 7),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(FormatError) as exc:
        parse_pattern(text)
    assert (exc.value.line, exc.value.column) == (line, column)
    assert f"line {line}" in str(exc.value)


# family JSON


def test_family_round_trip_and_hash():
    fam = family_pkr(3, 1, 0)
    text = serialize_family(fam)
    assert json.loads(text)["d"] == 3
    assert parse_family(text) == fam
    assert family_hash(parse_family(text)) == family_hash(fam)
    assert len(family_hash(fam)) == 16
    assert family_hash(fam) != family_hash(family_pkr(3, 1, 1))


@pytest.mark.parametrize(
    "text",
    ["{", "[]", '{"patterns": []}', '{"patterns": [{"dims": [2]}]}',
     '{"d": 3, "patterns": [{"dims": [2, 2], "ones": []}]}',
     '{"patterns": [{"dims": [2, 2], "ones": [[3, 1]]}]}'],
)
def test_family_errors(text):
    with pytest.raises(FormatError):
        parse_family(text)


def test_load_family_accepts_pattern_text(tmp_path):
    path = tmp_path / "i2.txt"
    path.write_text(I2_TEXT)
    assert load_family(path) == Family([I2])


# cache


def test_cache_round_trip_is_atomic(tmp_path):
    cache = ResultCache(tmp_path / "c")
    assert cache.get("abc", "ex", 3) is None
    rec = {"family_hash": "abc", "function": "ex", "n": 3, "value": 6}
    cache.put(rec)
    assert cache.get("abc", "ex", 3) == rec
    assert sorted(p.name for p in (tmp_path / "c").iterdir()) == ["abc-ex-3.json"]
    (tmp_path / "c" / "abc-ex-3.json").write_text("{broken")
    assert cache.get("abc", "ex", 3) is None


def test_env_var_overrides_flag(tmp_path, monkeypatch):
    assert resolve_cache_dir(None) is None
    assert resolve_cache_dir(str(tmp_path / "a")) == tmp_path / "a"
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "b"))
    assert resolve_cache_dir(str(tmp_path / "a")) == tmp_path / "b"


# commands


@pytest.fixture
def files(tmp_path):
    (tmp_path / "i2.txt").write_text(I2_TEXT)
    (tmp_path / "j22.txt").write_text("dims: 2 2\nones:\n1 1\n1 2\n2 1\n2 2\n")
    (tmp_path / "pkr.json").write_text(serialize_family(family_pkr(2, 2, 1)))
    (tmp_path / "host.txt").write_text(serialize_pattern(Tensor01.full((3, 3))))
    return tmp_path


def test_ex_json(capsys, files):
    code, out, _ = run(capsys, "ex", str(files / "i2.txt"), "-n", "3", "4")
    assert code == EXIT_OK
    recs = json.loads(out)
    assert [r["value"] for r in recs] == [5, 7]
    rec = recs[1]
    for key in ("family_hash", "function", "n", "value", "witness", "witness_weight", "nodes",
                "elapsed_ms", "exact", "stats", "version"):
        assert key in rec
    assert rec["version"] == __version__ and rec["witness_weight"] == 7


def test_sat_and_ssat_text(capsys, files):
    code, out, _ = run(capsys, "sat", str(files / "pkr.json"), "-n", "4", "--format", "text")
    assert code == EXIT_OK and out.startswith("sat(n=4) = 8")
    code, out, _ = run(capsys, "ssat", str(files / "i2.txt"), "-n", "3", "--format", "text")
    assert code == EXIT_OK and "ssat(n=3) = " in out


def test_report_csv_columns(capsys, files):
    code, out, _ = run(capsys, "report", str(files / "i2.txt"), str(files / "pkr.json"), "-n", "3", "--no-timings")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["family_hash", "function", "n", "value", "witness_weight", "nodes", "elapsed_ms", "exact"]
    assert [(r["function"], r["n"], r["value"], r["exact"]) for r in rows] == [
        ("ex", "3", "5", "True"), ("ex", "3", "6", "True")]
    assert all(r["elapsed_ms"] == "0" for r in rows)


def test_guard_exit_code(capsys, files):
    code, out, _ = run(capsys, "ex", str(files / "i2.txt"), "-n", "6")
    assert code == EXIT_GUARD
    rec = json.loads(out)[0]
    assert rec["exact"] is False and rec["status"] == "guard" and rec["value"] is None


def test_usage_errors(capsys, files):
    code, _, err = run(capsys, "ex", str(files / "missing.txt"), "-n", "3")
    assert code == EXIT_USAGE and "mpat: error" in err
    with pytest.raises(SystemExit) as exc:
        main(["ex", str(files / "i2.txt")])
    assert exc.value.code == EXIT_USAGE
    (files / "bad.txt").write_text("dims: 2 2\nones:\n9 9\n")
    code, _, err = run(capsys, "ex", str(files / "bad.txt"), "-n", "3")
    assert code == EXIT_USAGE and "line 3" in err
    code, _, _ = run(capsys, "classify-ssat", str(files / "i2.txt"), "--format", "csv")
    assert code == EXIT_USAGE


def test_cache_cold_and_warm_identical(capsys, files, monkeypatch):
    argv = ["report", str(files / "pkr.json"), "-n", "3", "4", "--no-timings", "--format", "json"]
    cache_dir = files / "cache"
    code, cold, _ = run(capsys, *argv, "--cache-dir", str(cache_dir))
    assert code == EXIT_OK
    h = family_hash(family_pkr(2, 2, 1))
    assert sorted(p.name for p in cache_dir.iterdir()) == [f"{h}-ex-3.json", f"{h}-ex-4.json"]
    code, warm, _ = run(capsys, *argv, "--cache-dir", str(cache_dir))
    assert warm == cold
    # renamed file, same content: still a hit; the env var wins over the flag
    (files / "renamed.json").write_text((files / "pkr.json").read_text())
    monkeypatch.setenv(ENV_VAR, str(cache_dir))
    argv[1] = str(files / "renamed.json")
    code, warm2, _ = run(capsys, *argv, "--cache-dir", str(files / "elsewhere"))
    assert warm2 == cold and not (files / "elsewhere").exists()


def test_contains_command(capsys, files):
    code, out, _ = run(capsys, "contains", str(files / "host.txt"), str(files / "i2.txt"))
    assert code == EXIT_OK and json.loads(out) == {"contains": True, "embedding": [[1, 2], [1, 2]]}
    code, out, _ = run(capsys, "contains", str(files / "host.txt"), str(files / "i2.txt"), "--cell", "3", "3")
    assert json.loads(out)["embedding"] == [[1, 3], [1, 3]]
    code, out, _ = run(capsys, "contains", str(files / "i2.txt"), str(files / "j22.txt"), "--format", "text")
    assert out == "contains: no\n"


def test_classify_and_decide(capsys, files):
    code, out, _ = run(capsys, "classify-ssat", str(files / "j22.txt"))
    assert code == EXIT_OK and json.loads(out)["exponent"] == 1
    fam = suites.four_pattern_family()
    (files / "four.json").write_text(serialize_family(fam))
    code, out, _ = run(capsys, "decide-o1", str(files / "four.json"), "--format", "text")
    assert code == EXIT_OK and "BoundedO1(2, 1)" in out


def test_gen_commands(capsys, files):
    code, out, _ = run(capsys, "gen", "pkr", "--d", "2", "--k", "2", "--r", "1")
    assert parse_family(out) == family_pkr(2, 2, 1)
    code, out, _ = run(capsys, "gen", "identity-equivalents", "--n0", "3", "--d", "3")
    assert len(parse_family(out)) == 4
    code, out, _ = run(capsys, "gen", "j-family", "--n0", "2", "--d", "2")
    assert len(parse_family(out)) == 4
    code, out, _ = run(capsys, "gen", "bdr", "--d", "2", "--r", "1")
    assert code == EXIT_OK
    code, out, _ = run(capsys, "gen", "ssat-witness", str(files / "j22.txt"), "--k", "1", "-n", "6")
    assert parse_family(out)[0].weight == 20
    code, out, _ = run(capsys, "gen", "ssat-pattern", "--d", "2", "--k", "1")
    assert parse_family(out)[0] == make_tensor([5, 5], [(2, 2)])
    code, a, _ = run(capsys, "gen", "random", "--d", "3", "--count", "3", "--seed", "4")
    code, b, _ = run(capsys, "gen", "random", "--d", "3", "--count", "3", "--seed", "4")
    assert a == b and parse_family(a).d == 3


def test_transform_commands(capsys, files):
    code, out, _ = run(capsys, "transform", "replicate", str(files / "j22.txt"), "--dim", "2")
    assert parse_family(out)[0].dims == (2, 2, 2)
    code, out, _ = run(capsys, "transform", "insert-layer", str(files / "i2.txt"), "--dim", "1", "--pos", "1",
                       "--format", "text")
    assert parse_pattern(out) == make_tensor([3, 2], [(1, 1), (3, 2)])
    code, out, _ = run(capsys, "transform", "lower", str(files / "i2.txt"), "--dim", "1", "--cell", "2", "2")
    assert parse_family(out)[0] == make_tensor([3, 2], [(1, 1), (3, 2)])
    code, _, err = run(capsys, "transform", "lift", str(files / "i2.txt"), "--dim", "1", "--cell", "2", "2")
    assert code == EXIT_USAGE and "top entry" in err


def test_filters_command(capsys, files):
    code, out, _ = run(capsys, "filters", "minnonlin", str(files / "i2.txt"))
    obj = json.loads(out)
    assert code == EXIT_OK and [f["name"] for f in obj["filters"]] == ["longest-side", "weight", "alternation", "end-layers"]


def test_verify_decisions(capsys, files):
    report = files / "rep.json"
    code, out, _ = run(capsys, "verify", "decisions", "--report", str(report))
    assert code == EXIT_OK and out.startswith("suite decisions: 14/14 checks passed")
    data = json.loads(report.read_text())
    assert data["passed"] and data["failed"] == 0 and data["schema"] == 1


def test_verify_failure_exit_code(capsys, monkeypatch):
    def broken(workers=1):
        return [{"criterion": 5, "check": "forced", "params": {}, "expected": 1, "observed": 2, "passed": False}]

    monkeypatch.setitem(suites.RUNNERS, "decisions", broken)
    code, out, _ = run(capsys, "verify", "decisions")
    assert code == EXIT_FAILED and "FAILED decisions/forced" in out


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(ValueError):
        suites.run_suite("nope")


def test_cache_hit_is_served_and_version_checked(capsys, files):
    cache_dir = files / "cache"
    argv = ["ex", str(files / "pkr.json"), "-n", "3", "--cache-dir", str(cache_dir)]
    run(capsys, *argv)
    (path,) = cache_dir.iterdir()
    rec = json.loads(path.read_text())
    rec["nodes"] = -1
    path.write_text(json.dumps(rec))
    _, out, _ = run(capsys, *argv)
    assert json.loads(out)[0]["nodes"] == -1
    rec["version"] = "0.0.0"
    path.write_text(json.dumps(rec))
    _, out, _ = run(capsys, *argv)
    assert json.loads(out)[0]["nodes"] >= 0


def test_guarded_results_are_not_cached(capsys, files):
    cache_dir = files / "cache"
    code, _, _ = run(capsys, "ex", str(files / "i2.txt"), "-n", "6", "--cache-dir", str(cache_dir))
    assert code == EXIT_GUARD and not cache_dir.exists()
