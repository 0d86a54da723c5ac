import json
import math

import mpmath
import numpy as np
import pytest
from pydantic import ValidationError

from k3_regulator_lab.core.exceptions import OutputValidationError
from k3_regulator_lab.core.utils.serialization import emit_csv, emit_json, load_yaml, read_csv_rows, to_plain
from k3_regulator_lab.core.validation.schema_validator import PSI_SCHEMA, PsiRow, RunConfig, validate_rows


def test_empty_table_still_has_header(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], PSI_SCHEMA, path)
    assert path.read_text().strip() == ",".join(PSI_SCHEMA)


def test_csv_floats_round_trip_bit_exactly(tmp_path):
    rng = np.random.default_rng(42)
    rows = [
        {
            "alpha": float(rng.uniform(-3, 3)),
            "psi": float(rng.normal() * 10.0 ** rng.integers(-8, 8)),
            "eta": float(rng.normal() * 1e-9),
            "psi_normalized": None if i % 7 == 0 else float(rng.normal()),
            "err_abs": float(rng.uniform(0, 1e-6)),
            "evals": int(rng.integers(0, 10**6)),
        }
        for i in range(100)
    ]
    path = tmp_path / "rows.csv"
    emit_csv(rows, PSI_SCHEMA, path)
    back = read_csv_rows(path)
    assert len(back) == 100
    for original, parsed in zip(rows, back):
        assert parsed["psi"] == original["psi"]
        assert parsed["alpha"] == original["alpha"]
        assert parsed["psi_normalized"] == original["psi_normalized"]
        assert parsed["evals"] == original["evals"]


def test_json_rejects_nan(tmp_path):
    with pytest.raises(OutputValidationError):
        emit_json({"kappa": math.nan}, tmp_path / "bad.json")
    assert not (tmp_path / "bad.json").exists()


def test_json_converts_numpy_and_mpmath(tmp_path):
    path = tmp_path / "report.json"
    emit_json({"a": np.float64(1.5), "b": mpmath.mpf("0.25"), "z": 1 + 2j, "v": np.arange(3)}, path)
    data = json.loads(path.read_text())
    assert data == {"a": 1.5, "b": 0.25, "z": {"re": 1.0, "im": 2.0}, "v": [0, 1, 2]}


def test_to_plain_handles_enums_and_tuples():
    from k3_regulator_lab.core.numerics.types import PrecisionMode

    assert to_plain((PrecisionMode.EXTENDED, 1)) == ["extended", 1]


def test_validate_rows_rejects_non_finite():
    with pytest.raises(OutputValidationError):
        validate_rows([{"alpha": 0.3, "psi": math.inf, "eta": 0.0, "err_abs": 0.0, "evals": 1}], PsiRow)


def test_validate_rows_rejects_negative_error():
    with pytest.raises(OutputValidationError):
        validate_rows([{"alpha": 0.3, "psi": 1.0, "eta": 0.0, "err_abs": -1.0, "evals": 1}], PsiRow)


def test_run_config_bounds():
    config = RunConfig(command="psi", rel_tol=1e-8)
    assert config.precision == "double"
    assert config.seed == 42
    with pytest.raises(ValidationError):
        RunConfig(command="psi", rel_tol=0.0)
    with pytest.raises(ValidationError):
        RunConfig(command="kappa", dps=8)
    with pytest.raises(ValidationError):
        RunConfig(command="psi", output_path="  ")
    with pytest.raises(ValidationError):
        RunConfig(command="psi", colour="red")


def test_load_yaml(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("kappa:\n  dps: 32\n")
    assert load_yaml(path) == {"kappa": {"dps": 32}}
