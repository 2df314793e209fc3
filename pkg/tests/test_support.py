import json
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from cli.export import format_value, json_ready, parse_value, table_to_csv, table_to_json
from cli.runconfig import RunConfig
from cli.validation import validate_finite, validate_grid
from config import Settings
from dynamics.models import IntegratorMethod
from geometry import ParameterError


# ==================== VALIDATION ====================

def test_grid_range():
    ok, _, values = validate_grid("1:2:0.5")
    assert ok
    assert values == [1.0, 1.5, 2.0]


def test_grid_range_keeps_its_end_point():
    ok, _, values = validate_grid("0.1:0.3:0.1")
    assert ok
    assert len(values) == 3
    assert values[-1] == 0.3


def test_grid_list_is_sorted_and_unique():
    ok, message, values = validate_grid(" 3, 1,2,2 ")
    assert ok
    assert values == [1.0, 2.0, 3.0]
    assert message.startswith("3 points")


@pytest.mark.parametrize("text", ["", "   ", "5:1:1", "0:1:0", "1:2", "a,b", "1:inf:1", "nan"])
def test_invalid_grids(text):
    ok, message, values = validate_grid(text)
    assert not ok
    assert message
    assert values is None


def test_grid_size_limit():
    ok, message, _ = validate_grid("0:1:1e-6")
    assert not ok
    assert "too many" in message


def test_validate_finite():
    assert validate_finite("rho", None) == (True, "", None)
    assert validate_finite("rho", "28") == (True, "28.0", 28.0)
    assert not validate_finite("rho", "abc")[0]
    assert not validate_finite("rho", float("-inf"))[0]


# ==================== EXPORT ====================

def test_cell_formatting():
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(1) / 3) == repr(1 / 3)
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(float("nan")) == "nan"
    assert parse_value("0.1") == 0.1
    assert parse_value("false") is False
    assert parse_value("S+") == "S+"
    assert parse_value("") is None


def test_csv_uses_unix_line_endings():
    text = table_to_csv(["a", "b"], [[1.0, "x"], [2.5, None]])
    assert text == "a,b\n1.0,x\n2.5,\n"


def test_json_table_converts_numpy_scalars():
    text = table_to_json(["a", "b"], [[np.float64(0.5), np.bool_(True)]])
    assert '"a": 0.5' in text
    assert '"b": true' in text


def test_json_table_writes_null_for_non_finite_values():
    text = table_to_json(["a", "b", "c"], [[float("nan"), np.float64(np.inf), -np.inf]])
    assert "NaN" not in text and "Infinity" not in text
    assert json.loads(text) == [{"a": None, "b": None, "c": None}]


def test_json_ready_walks_nested_values():
    assert json_ready({"x": [1.0, float("nan")], "y": (np.int64(2), {"z": np.float32(0.5)})}) == {
        "x": [1.0, None],
        "y": [2, {"z": 0.5}],
    }


# ==================== RUN CONFIGURATION ====================

def test_run_config_integrator_selection():
    assert RunConfig().integrator(IntegratorMethod.RK4_FIXED, 20.0).method is IntegratorMethod.RK4_FIXED
    assert RunConfig(tol=1e-8).integrator(IntegratorMethod.RK4_FIXED, 20.0).method is IntegratorMethod.RK45_ADAPTIVE
    assert RunConfig(step=1e-3).integrator(IntegratorMethod.RK45_ADAPTIVE, 2.0).method is IntegratorMethod.RK4_FIXED
    cfg = RunConfig(method="dop853_adaptive", t_end=3.0).integrator(IntegratorMethod.RK4_FIXED, 20.0)
    assert cfg.method is IntegratorMethod.DOP853_ADAPTIVE
    assert cfg.t_end == 3.0
    with pytest.raises(ParameterError):
        RunConfig(step=1e-3, tol=1e-8).integrator(IntegratorMethod.RK4_FIXED, 20.0)


def test_run_config_rejects_non_finite():
    with pytest.raises(ValidationError):
        RunConfig(sigma=float("nan"))


# ==================== SETTINGS ====================

def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("KCC_RHO", "15")
    monkeypatch.setenv("KCC_LOG_LEVEL", "debug")
    current = Settings()
    assert current.rho == 15.0
    assert current.log_level == "DEBUG"
    assert current.effective_log_level == logging.DEBUG


def test_settings_reject_unknown_log_level():
    with pytest.raises(ValidationError):
        Settings(log_level="chatty")


def test_settings_physical_warnings():
    warnings = Settings(sigma=-1.0, sample_every=1e-4).validate_physical()
    assert any("KCC_SIGMA" in w for w in warnings)
    assert any("KCC_SAMPLE_EVERY" in w for w in warnings)
