#!/usr/bin/env python3
"""
Tests for run configuration loading and overrides
"""

import json
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp

from config import RunConfig, load_config, parse_rationals, resolve_config, to_fraction
from errors import ConfigError
from opalgebra import SchemeKind

CONFIGS = Path(__file__).parent / "configs"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("SCHEME", "NMAX", "OUT_DIR"):
        monkeypatch.delenv(name, raising=False)


def _write(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    return path


def test_rationals():
    assert to_fraction("1/3") == Fraction(1, 3)
    assert to_fraction(0.5) == Fraction(1, 2)
    assert to_fraction(0.1) == Fraction(1, 10)
    assert parse_rationals("1/2, 1/4,1/4") == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    with pytest.raises(ValueError):
        to_fraction(True)
    with pytest.raises(ValueError):
        to_fraction("1/0")


def test_defaults():
    cfg = RunConfig()
    scheme = cfg.scheme.build()
    assert scheme.kind is SchemeKind.PAPER
    assert scheme.n == (sp.Rational(1, 3),) * 3
    assert cfg.n_max == 2
    assert cfg.modeset.build().symmetric
    assert RunConfig.model_validate(cfg.echo()) == cfg


@pytest.mark.parametrize("name", ["paper.json", "paper_half_quarter.json", "standard.json",
                                  "custom_pass.json", "custom_fail.json"])
def test_shipped_configs_load(name):
    cfg = resolve_config(CONFIGS / name)
    cfg.scheme.build()


def test_half_quarter_config():
    scheme = load_config(CONFIGS / "paper_half_quarter.json").scheme.build()
    assert scheme.c == (-1, sp.Rational(1, 2), sp.Rational(1, 4), sp.Rational(1, 4))


@pytest.mark.parametrize("scheme, path", [
    ({"kind": "paper", "n": ["1/2", "1/2", "1/2"]}, "scheme.n"),
    ({"kind": "paper", "n": ["1/2", "-1/4", "3/4"]}, "scheme.n.1"),
    ({"kind": "paper", "n": ["1/2", "1/2"]}, "scheme.n"),
    ({"kind": "custom"}, "scheme"),
    ({"kind": "standard", "n": ["1/3", "1/3", "1/3"]}, "scheme"),
    ({"kind": "custom", "c": ["-1", "0", "1", "1"]}, "scheme.c"),
    ({"kind": "paper", "weights": []}, "scheme.weights"),
])
def test_invalid_scheme_reports_field_path(tmp_path, scheme, path):
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, {"scheme": scheme}))
    assert info.value.path == path


def test_invalid_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, {"modeset": {"modes": [[0, 0, 0]]}}))
    assert info.value.path == "modeset.modes"
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, {"causality": {"epsilons": [0.01, 0.02]}}))
    assert info.value.path == "causality.epsilons"


def test_environment_and_cli_precedence(tmp_path, monkeypatch):
    path = _write(tmp_path, {"n_max": 3, "output": {"dir": "from_file"}})
    assert resolve_config(path).n_max == 3

    monkeypatch.setenv("SCHEME", "standard")
    monkeypatch.setenv("NMAX", "4")
    monkeypatch.setenv("OUT_DIR", "from_env")
    cfg = resolve_config(path)
    assert cfg.scheme.kind == "standard"
    assert cfg.n_max == 4
    assert cfg.output.report_path == Path("from_env") / "report.json"

    cfg = resolve_config(path, scheme="paper", n_max=1, out_dir="from_cli")
    assert cfg.scheme.kind == "paper"
    assert cfg.n_max == 1
    assert cfg.output.scan_path == Path("from_cli") / "lightcone_scan.csv"


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("NMAX", "two")
    with pytest.raises(ConfigError):
        resolve_config()


def test_scheme_override_drops_custom_parameters():
    cfg = resolve_config(CONFIGS / "custom_fail.json", scheme="standard")
    assert cfg.scheme.c is None
    assert cfg.scheme.build().kind is SchemeKind.STANDARD


def test_custom_override_without_constants_is_rejected():
    with pytest.raises(ConfigError):
        resolve_config(scheme="custom")
