import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from zoo.cli import main
from zoo.errors import ConfigError, ParamError, UnknownEntry
from zoo.numeric import from_decimal_string
from zoo.report import (
    CLASSIFICATIONS,
    ENTRY_IDS,
    VerdictReport,
    classify,
    load_config,
    load_manifest,
    run_all,
    run_entry,
)

MANIFEST = load_manifest()["entries"]
FAST_IDS = [eid for eid in ENTRY_IDS if eid != "borwein-integral"]


def params_for(eid):
    return MANIFEST[eid].get("params", {})


def test_manifest_covers_every_entry():
    assert sorted(MANIFEST) == sorted(ENTRY_IDS)
    assert len(ENTRY_IDS) == 15
    assert all(MANIFEST[eid]["expected"] in CLASSIFICATIONS for eid in ENTRY_IDS)


def test_classify_rules():
    with mpmath.workdps(40):
        assert classify(mpf(1), mpf("1e-60"), 60) == "TRUE"
        assert classify(mpf(1), mpf("1e-60"), 60, certified_nonzero=True) == "FRAUD"
        assert classify(mpf(1), mpf("1e-7"), 60) == "FRAUD"
        assert classify(mpf(1), mpf("0.4"), 60) == "FALSE"
        assert classify(mpf(1000), mpf("1e-3"), 60) == "FRAUD"
        assert classify(mpf(1), mpf(0), 60, certified_nonzero=True) == "FALSE"


report_fields = st.fixed_dictionaries(
    {
        "entry_id": st.sampled_from(ENTRY_IDS),
        "claim": st.text(max_size=40),
        "claimed_value": st.text(alphabet="0123456789e+-.", min_size=1, max_size=20),
        "computed_value": st.text(alphabet="0123456789e+-.", min_size=1, max_size=20),
        "abs_error": st.text(alphabet="0123456789e+-.", min_size=1, max_size=20),
        "classification": st.sampled_from(CLASSIFICATIONS),
        "precision_digits": st.integers(min_value=6, max_value=1000),
        "terms_used": st.integers(min_value=0, max_value=10 ** 9),
        "method": st.text(max_size=30),
        "runtime_ms": st.integers(min_value=0, max_value=10 ** 7),
        "notes": st.lists(st.text(max_size=30), max_size=4),
    }
)


@settings(max_examples=50, deadline=None)
@given(report_fields)
def test_report_round_trip(fields):
    report = VerdictReport(**fields)
    assert VerdictReport.from_json(report.to_json()) == report


def test_report_keys_are_snake_case():
    report = run_entry("entry5", params_for("entry5"))
    assert list(report.to_dict()) == [
        "entry_id", "claim", "claimed_value", "computed_value", "abs_error", "classification",
        "precision_digits", "terms_used", "method", "runtime_ms", "notes",
    ]


def test_malformed_report_rejected():
    with pytest.raises(ConfigError):
        VerdictReport.from_dict({"entry_id": "entry5"})


def test_zeta4_example():
    assert run_entry("entry2-zeta4", terms=500, digits=60).classification == "TRUE"


def test_zeta6_example():
    report = run_entry("entry2-zeta6", terms=500, digits=60)
    assert report.classification == "FALSE"
    with mpmath.workdps(80):
        correction = from_decimal_string(report.computed_value) - from_decimal_string(report.claimed_value)
        assert mpmath.nstr(correction, 6) == "0.438668"


def test_entry5_example():
    report = run_entry("entry5", k=10, digits=150)
    assert report.classification == "FRAUD"
    assert report.abs_error.startswith("1.11") and report.abs_error.endswith("e-105")


@pytest.mark.parametrize("eid", FAST_IDS)
def test_report_invariants_and_expected_class(eid):
    report = run_entry(eid, params_for(eid))
    assert report.classification == MANIFEST[eid]["expected"]
    with mpmath.workdps(report.precision_digits + 20):
        err = from_decimal_string(report.abs_error)
        scale = max(mpf(1), abs(from_decimal_string(report.claimed_value)))
        if report.classification == "TRUE":
            assert err <= mpf(10) ** -(report.precision_digits - 5) * scale
        else:
            assert err > 0
            assert any("threshold" in note for note in report.notes)
        if report.classification == "FRAUD":
            assert err < mpf("1e-5") * scale


@pytest.mark.parametrize("eid", FAST_IDS)
def test_classification_stable_with_more_digits(eid):
    low = run_entry(eid, params_for(eid), digits=60)
    high = run_entry(eid, params_for(eid), digits=110)
    assert low.classification == high.classification


@pytest.mark.slow
def test_borwein_classification_stable_with_more_digits():
    params = {"last": 15, "ladder": False}
    low = run_entry("borwein-integral", params, digits=60)
    high = run_entry("borwein-integral", params, digits=110)
    assert low.classification == high.classification == "FRAUD"


def test_run_entry_is_deterministic():
    a = run_entry("entry3-m4", params_for("entry3-m4")).to_dict()
    b = run_entry("entry3-m4", params_for("entry3-m4")).to_dict()
    a.pop("runtime_ms")
    b.pop("runtime_ms")
    assert a == b


def test_parameter_errors():
    with pytest.raises(UnknownEntry):
        run_entry("entry6")
    with pytest.raises(ParamError):
        run_entry("entry5", {"base": 10})
    with pytest.raises(ParamError):
        run_entry("entry5", {"k": "ten"})
    with pytest.raises(ParamError):
        run_entry("entry1", {"a": "1/0"})


def test_load_config(tmp_path):
    assert load_config(None) == {}
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert load_config(empty) == {}
    for text in ("[1, 2]", '{"colour": 1}', '{"skip": ["entry9"]}', "{not json"):
        bad = tmp_path / "bad.json"
        bad.write_text(text)
        with pytest.raises(ConfigError):
            load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def test_run_all_with_skip_and_output(tmp_path, capsys):
    config = write_config(tmp_path, {"skip": ["borwein-integral", "entry1"]})
    out = tmp_path / "reports.json"
    summary = run_all(config, out)
    assert summary.exit_code == 0
    data = json.loads(out.read_text())
    ids = [r["entry_id"] for r in data]
    assert ids == sorted(ids) and len(ids) == 13
    assert "MISMATCH" not in capsys.readouterr().out


def test_run_all_reports_mismatch(tmp_path):
    config = write_config(
        tmp_path,
        {"skip": [eid for eid in ENTRY_IDS if eid != "entry2-zeta4"],
         "entries": {"entry2-zeta4": {"params": {"terms": 10}}}},
    )
    summary = run_all(config, echo=False)
    assert summary.mismatches == ["entry2-zeta4"]
    assert summary.exit_code == 1


def test_run_all_collects_errors(tmp_path, monkeypatch):
    monkeypatch.setenv("ZOO_MAX_TERMS", "50")
    config = write_config(tmp_path, {"skip": [eid for eid in ENTRY_IDS if eid != "entry5"]})
    summary = run_all(config, echo=False)
    assert "entry5" in summary.errors
    assert summary.exit_code == 3
    assert "ERROR" in summary.table()


def test_cli_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [line.split()[0] for line in lines] == list(ENTRY_IDS)


def test_cli_run_writes_json(tmp_path, capsys):
    out = tmp_path / "entry5.json"
    assert main(["run", "entry5", "--digits", "150", "--json", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert VerdictReport.from_dict(printed) == VerdictReport.from_json(out.read_text())


def test_cli_run_mismatch_exit_code():
    assert main(["run", "entry2-zeta4", "--terms", "10"]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "entry6"],
        ["run", "entry5", "--param", "base=10"],
        ["run", "entry5", "--param", "k"],
        ["run", "entry5", "--digits", "3"],
        ["run-all", "--config", "/nonexistent/config.json"],
    ],
)
def test_cli_parameter_errors_exit_2(argv):
    assert main(argv) == 2


def test_cli_resource_error_exit_3(monkeypatch):
    monkeypatch.setenv("ZOO_MAX_TERMS", "50")
    assert main(["run", "entry5", "--terms", "400"]) == 3


def test_cli_run_all_with_config(tmp_path):
    config = write_config(tmp_path, {"digits": 80, "skip": ["borwein-integral", "entry1"]})
    assert main(["run-all", "--config", str(config), "--json", str(tmp_path / "out.json")]) == 0
    reports = json.loads((tmp_path / "out.json").read_text())
    assert all(r["precision_digits"] >= 80 for r in reports if r["entry_id"] != "borwein-integral")
