import json

import pytest

from drinfeld_periods.cli import main
from drinfeld_periods.config import SessionConfig
from drinfeld_periods.errors import ValidationError


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_periods_deterministic(capsys):
    code, rep, raw = run(capsys, "periods")
    code2, _, raw2 = run(capsys, "periods")
    assert code == code2 == 0 and raw == raw2
    for key in ("omega1", "omega2", "pi_tilde", "xi", "Ftau_omega1", "Ftau_omega2", "branch_metadata"):
        assert key in rep
    assert rep["branch_metadata"]["torsion_root_indices"][0] == 0


def test_third_kind(capsys):
    code, rep, _ = run(capsys, "third-kind", "--alpha", "1,1", "--omega", "2")
    assert code == 0 and rep["pass"] and "lambda0" in rep


def test_third_kind_wild_alpha_reports_error(capsys):
    code, rep, _ = run(capsys, "third-kind", "--alpha", "[0,0,1]")
    assert code == 2 and rep["error"] == "RepresentationError" and rep["wild"] is True


@pytest.mark.parametrize("suite", ["legendre", "difference", "cm"])
def test_verify_suites(capsys, suite):
    code, rep, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0 and rep["pass"]
    for c in rep["checks"]:
        assert set(c) >= {"name", "residual_valuation", "threshold", "pass"}


def test_dump(capsys):
    code, rep, _ = run(capsys, "dump", "exp", "--terms", "3")
    assert code == 0 and [c["valuation"] for c in rep["coefficients"]] == ["0", "inf", "9"]
    code, rep, _ = run(capsys, "dump", "agf", "--terms", "2", "--deg", "4", "--u", "1")
    assert code == 0 and len(rep["coefficients"]) == 2
    code, rep, _ = run(capsys, "dump", "omega", "--terms", "2")
    assert code == 0


def test_bad_m_names_required(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m": 4}))
    code, rep, _ = run(capsys, "--config", str(cfg), "periods")
    assert code == 2 and rep["required_m"] == 8 and rep["field"] == "m"


def test_bad_s_names_required():
    with pytest.raises(ValidationError) as err:
        SessionConfig(s=2).validate()
    assert err.value.payload["required_s"] == 4


def test_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, rep, _ = run(capsys, "--config", str(cfg), "periods")
    assert code == 2 and rep["error"] == "ValidationError"


def test_general_delta_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"delta": [0, 1]}))
    code, rep, _ = run(capsys, "--config", str(cfg), "verify", "--suite", "legendre")
    assert code == 0
    code, rep, _ = run(capsys, "--config", str(cfg), "periods")
    assert "twist" in rep["branch_metadata"]


def test_cm_suite_rejects_non_cm(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kappa": [1]}))
    code, rep, _ = run(capsys, "--config", str(cfg), "verify", "--suite", "cm")
    assert code == 2


def test_validator_other_fields():
    for kw in ({"p": 4}, {"slack": 200}, {"delta": [0]}, {"I": 1}, {"kappa": [5]}):
        with pytest.raises(ValidationError):
            SessionConfig(**kw).validate()
    with pytest.raises(ValidationError) as err:
        SessionConfig(kappa=[0, 1]).validate()
    assert "wild" in err.value.payload["message"]


def test_table_on_stderr(capsys):
    assert main(["verify", "--suite", "legendre"]) == 0
    err = capsys.readouterr().err
    assert "legendre_relation" in err and "overall: PASS" in err
