import json

import pandas as pd
import pytest

from k3_regulator_lab.cli.main_cli import create_parser, main
from k3_regulator_lab.core.validation.schema_validator import PSI_SCHEMA


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "psi-scan" in capsys.readouterr().out


def test_unknown_flag_is_a_usage_error():
    assert main(["psi", "--alpha", "0.3", "--bogus"]) == 2


def test_missing_subcommand_is_a_usage_error():
    assert main([]) == 2


def test_excluded_alpha_is_a_domain_error():
    assert main(["psi", "--alpha", "1.0"]) == 2


def test_invalid_tolerance_is_rejected_before_computing():
    assert main(["psi", "--alpha", "0.3", "--tol", "0"]) == 2


def test_parser_knows_every_command():
    parser = create_parser()
    for command in ("psi", "eta", "psi-scan", "limit-check", "appendix", "kummer", "pf", "kappa", "verify"):
        assert parser.parse_args(_minimal(command)).command == command


def _minimal(command):
    required = {
        "psi": ["--alpha", "0.3"],
        "eta": ["--alpha", "0.3"],
        "psi-scan": ["--from", "0.1", "--to", "0.9", "--steps", "3"],
        "appendix": ["--eps", "0.1", "--chi", "0.02"],
        "kummer": ["--alpha", "0.3", "--beta", "0.6"],
    }
    return [command, *required.get(command, [])]


def test_kummer_table(capsys):
    assert main(["kummer", "--alpha", "0.3", "--beta", "0.6", "--table"]) == 0
    out = capsys.readouterr().out
    assert "special points" in out
    assert "Delta roots" in out
    assert "I6*" in out


def test_kummer_json_census(capsys):
    assert main(["kummer", "--alpha", "0.5", "--beta", "0.5", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert [e["type"] for e in report["census"]] == ["I2", "I4", "I4", "I2", "I6*"]


def test_kummer_json_table(capsys):
    assert main(["kummer", "--alpha", "0.3", "--beta", "0.6", "--table", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert len(report["special_points"]) == 8
    assert report["cycle_valid"] is True


def test_kummer_rejects_degenerate_moduli():
    assert main(["kummer", "--alpha", "0.0", "--beta", "0.5"]) == 2


def test_pf_operator_tables(capsys):
    assert main(["pf", "--suite", "operators", "--points", "0.25", "2.0", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["operators"]) == {"decoupled", "cubic_Yt", "quartic_sigma1", "factor1", "factor2"}
    assert len(report["operators"]["factor2"]) == 2


def test_verify_lists_suites(capsys):
    assert main(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert names[0] == "kummer-identities"
    assert "kappa" in names


def test_verify_needs_a_selection():
    assert main(["verify"]) == 2


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "no-such-suite"]) == 2


def test_verify_fast_suites_to_csv(tmp_path):
    path = tmp_path / "summary.csv"
    code = main(["verify", "--suite", "special-points", "fiber-census", "--csv", str(path)])
    assert code == 0
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["suite", "criterion", "passed", "elapsed_s", "detail"]
    assert frame["suite"].tolist() == ["special-points", "fiber-census"]
    assert frame["passed"].all()


@pytest.mark.slow
def test_psi_scan_writes_schema_rows(tmp_path):
    path = tmp_path / "scan.csv"
    scan = ["psi-scan", "--from", "0.05", "--to", "0.95", "--steps", "19"]
    code = main([*scan, "--tol", "1e-4", "--csv", str(path)])
    assert code == 0
    frame = pd.read_csv(path)
    assert list(frame.columns) == PSI_SCHEMA
    assert len(frame) == 19
    assert frame["alpha"].iloc[0] == pytest.approx(0.05)
    assert frame["alpha"].iloc[-1] == pytest.approx(0.95)


def test_pf_cubic_transcription(capsys):
    assert main(["pf", "--suite", "cubic", "--points", "0.25", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"cubic"}
    assert report["cubic"]["singular_points"]
    assert list(report["cubic"]["coefficients"][0]) == ["t", "c0", "c1", "c2", "c3"]
