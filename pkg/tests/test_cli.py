import io
import json
import re

import pytest

from sumset_density.cli import parse_set, run
from sumset_density.periodic_sets import NATURALS


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_construct_rational_prints_sumset_and_density():
    code, out, _ = invoke("construct", "--theorem", "3.1", "--alpha", "1/2", "--n", "2", "--k", "2")
    assert code == 0
    assert "kA = {0} + mod 4 {1,2} from 4" in out
    assert "buck = 1/2" in out


def test_construct_theorem_names_are_aliases():
    a = invoke("construct", "--theorem", "sumset", "--alpha", "2/3", "--n", "3")
    b = invoke("construct", "--theorem", "3.1", "--alpha", "2/3", "--n", "3")
    assert a == b and a[0] == 0


def test_construct_irrational_and_translate_and_basis():
    assert invoke("construct", "--theorem", "3.1", "--alpha", "sqrt2-half", "--n", "2",
                  "--stage", "3")[0] == 0
    code, out, _ = invoke("construct", "--theorem", "translate", "--alpha", "1/3", "--B", "0,1")
    assert code == 0 and "buck = 1/3" in out
    assert invoke("construct", "--theorem", "3.3", "--alpha", "1/2", "--N", "500")[0] == 0


def test_expand_table():
    code, out, _ = invoke("expand", "--alpha", "golden-conjugate", "--n", "2", "--depth", "5")
    assert code == 0
    rows = [line.split(" | ") for line in out.splitlines() if re.match(r"\s+\d+ \|", line)]
    assert [(r[1], r[2]) for r in rows] == [("7", "2"), ("9", "1"), ("5", "2"), ("13", "4"), ("17", "7")]
    assert rows[0][3].startswith("4/7")


def test_counterexample_command():
    code, out, _ = invoke("counterexample", "--kmax", "20")
    assert code == 0
    assert "FAIL" not in out


def test_sumset_and_density_commands():
    code, out, _ = invoke("sumset", "mod 3 {0}", "mod 5 {0}")
    assert code == 0 and "result = mod 1 {0} from 8 except-remove {1,2,4,7}" in out
    code, out, _ = invoke("sumset", "{0} + mod 4 {1} from 4", "--k", "2")
    assert "result = {0} + mod 4 {1,2} from 4" in out
    code, out, _ = invoke("density", "--set", "mod 4 {1}", "--estimator", "prefix", "--N", "100")
    assert code == 0 and "estimate = 1/4" in out
    code, out, _ = invoke("density", "--construction", "sumset", "--alpha", "golden-conjugate",
                          "--n", "2", "--k", "2", "--stage", "3")
    assert code == 0 and "buck_interval" in out


def test_verify_subset_of_suites():
    code, out, _ = invoke("verify", "--suite", "rational", "--suite", "periodic", "--seed", "3")
    assert code == 0
    assert out.count("result: PASS") == 2


@pytest.mark.parametrize("argv", [
    ("construct", "--theorem", "3.1", "--alpha", "0.5"),
    ("construct", "--theorem", "3.1", "--alpha", "1/2", "--n", "2", "--k", "3"),
    ("sumset", "mod 3 {0"),
    ("expand", "--alpha", "1/3"),
    ("frobnicate",),
    ("verify", "--bogus-flag"),
])
def test_usage_errors_exit_2(argv):
    code, _, err = invoke(*argv)
    assert code == 2


def test_failing_check_exits_1(monkeypatch):
    from sumset_density import cli
    from sumset_density.report import Report

    def failing(seed):
        rep = Report("forced")
        rep.check("never", False)
        return rep

    monkeypatch.setitem(cli.SUITES, "rational", ("forced failure", failing))
    assert invoke("verify", "--suite", "rational")[0] == 1


def test_records_are_deterministic_and_exact():
    argv = ("verify", "--suite", "sandwich", "--suite", "basis", "--format", "records")
    first, second = invoke(*argv), invoke(*argv)
    assert first == second
    numeric = re.compile(r"^-?\d+/\d+$")

    def walk(value):
        if isinstance(value, dict):
            for v in value.values():
                yield from walk(v)
        elif isinstance(value, list):
            for v in value:
                yield from walk(v)
        else:
            yield value

    for line in first[1].splitlines():
        record = json.loads(line)
        assert record["schema"] == "sumset-density/1"
        for value in walk(record.get("values", {})) if "values" in record else ():
            assert not isinstance(value, (int, float)) or isinstance(value, bool)
            if isinstance(value, str) and re.fullmatch(r"-?[\d./e]+", value):
                assert numeric.match(value), value
        for value in walk(record.get("row", {})):
            assert not isinstance(value, (int, float)) or isinstance(value, bool)


def test_parse_set_is_exported():
    assert parse_set("mod 1 {0}") == NATURALS
