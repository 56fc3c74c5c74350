#!/usr/bin/env python3
"""
End-to-end tests for the vacuum workbench command line
"""

import json
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sps

from report import load_report
from vacuum_workbench import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, _density_deviation, main

CONFIGS = Path(__file__).parent / "configs"
GOLDEN_PAPER_HAMILTONIAN = "ad[1,0]*a[1,0] + ad[2,0]*a[2,0] + ad[3,0]*a[3,0] - a[0,0]*ad[0,0]"

SMALL = {
    "random": {"cases": 5},
    "causality": {"r_grid": [1.0, 2.0], "ct_grid": [-1.0, 0.0, 1.0], "epsilons": [0.05, 0.02, 0.01]},
    "vev_expressions": ["ad[0,0]*a[0,0]", "a[1,0]*ad[1,0]"],
}


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("SCHEME", "NMAX", "OUT_DIR"):
        monkeypatch.delenv(name, raising=False)


def _config(tmp_path, **overrides):
    data = json.loads(json.dumps(SMALL))
    data.update(overrides)
    path = tmp_path / "small.json"
    path.write_text(json.dumps(data))
    return path


def _run(tmp_path, *args, config=None, nmax=2):
    argv = ["--quiet", "--out", str(tmp_path / "out"), "--nmax", str(nmax)]
    if config is not None:
        argv += ["--config", str(config)]
    return main(argv + list(args))


def _records(report):
    return {r.name: r for section in report.sections.values() for r in section}


def test_vacuum_energy_table(tmp_path):
    assert _run(tmp_path, "vacuum-energy", config=_config(tmp_path)) == EXIT_OK
    records = _records(load_report(tmp_path / "out" / "report.json"))
    assert records["vacuum_energy.standard_raw"].exact == "8*pi"
    assert records["vacuum_energy.standard_normal_ordered"].exact == "0"
    assert records["vacuum_energy.paper_raw"].exact == "0"
    assert records["vacuum_energy.paper_random_splits"].passed


def test_report_is_deterministic(tmp_path):
    config = _config(tmp_path)
    assert _run(tmp_path, "vacuum-energy", config=config) == EXIT_OK
    first = json.loads((tmp_path / "out" / "report.json").read_text())
    assert _run(tmp_path, "vacuum-energy", config=config) == EXIT_OK
    second = json.loads((tmp_path / "out" / "report.json").read_text())
    first.pop("generated_at")
    second.pop("generated_at")
    assert first == second


@pytest.mark.parametrize("name", ["paper.json", "standard.json", "custom_pass.json"])
def test_verify_commutators_passes(tmp_path, name):
    config = json.loads((CONFIGS / name).read_text())
    config.pop("output", None)
    config.update({"random": {"cases": 5}})
    assert _run(tmp_path, "verify-commutators", config=_config(tmp_path, **config)) == EXIT_OK
    report = load_report(tmp_path / "out" / "report.json")
    assert report.all_passed
    assert report.summary.total == len(_records(report))


def test_minimal_truncation_passes(tmp_path):
    # at n_max = 1 the role-swapped mode-sum H realizes to the zero matrix
    config = json.loads((CONFIGS / "paper.json").read_text())
    config.pop("output", None)
    config.update({"random": {"cases": 5}})
    assert _run(tmp_path, "verify-commutators", config=_config(tmp_path, **config), nmax=1) == EXIT_OK
    records = _records(load_report(tmp_path / "out" / "report.json"))
    assert records["field.density_matches_mode_sum"].passed


def test_density_deviation_has_absolute_floor():
    zero = sps.csr_matrix((4, 4), dtype=complex)
    noise = sps.csr_matrix(np.diag([1e-16, 0, 0, 0]).astype(complex))
    assert _density_deviation(zero, zero) == 0.0
    assert _density_deviation(noise, zero) == 1e-16
    identity = sps.identity(4, format="csr", dtype=complex)
    assert _density_deviation(101 * identity, 100 * identity) == pytest.approx(0.01)


def test_custom_scheme_with_wrong_sum_fails_cleanly(tmp_path):
    config = _config(tmp_path, scheme={"kind": "custom", "c": ["-1", "1/2", "1/2", "1/2"]})
    assert _run(tmp_path, "verify-commutators", config=config) == EXIT_CHECK_FAILED
    report = load_report(tmp_path / "out" / "report.json")
    failed = [r.name for r in report.failures()]
    assert "commutator.spatial_sum" in failed
    assert _records(report)["commutator.spatial_sum"].exact == "3/2"


def test_causality_writes_scan(tmp_path):
    assert _run(tmp_path, "causality", config=_config(tmp_path)) == EXIT_OK
    assert (tmp_path / "out" / "lightcone_scan.csv").exists()
    records = _records(load_report(tmp_path / "out" / "report.json"))
    assert records["lightcone.odd_in_time"].passed
    assert records["lightcone.equal_time_zero"].passed


def test_vev_subcommand(tmp_path, capsys):
    assert _run(tmp_path, "vev", "ad[0,0]*a[0,0]", "a[1,0]*ad[1,0]") == EXIT_OK
    output = capsys.readouterr().out
    assert "exact = 1 " in output
    assert "exact = 1/3" in output
    records = _records(load_report(tmp_path / "out" / "report.json"))
    assert records["vev[a[1,0]*ad[1,0]]"].exact == "1/3"


def test_vev_corpus(tmp_path):
    corpus = Path(__file__).parent / "golden" / "expressions.txt"
    assert _run(tmp_path, "vev", "--corpus", str(corpus)) == EXIT_OK
    assert len(load_report(tmp_path / "out" / "report.json").sections["vev"]) == 8


def test_vev_syntax_error_is_usage_error(tmp_path):
    assert _run(tmp_path, "vev", "a[4,0]") == EXIT_USAGE
    assert not (tmp_path / "out" / "report.json").exists()


def test_vev_without_expressions(tmp_path):
    assert _run(tmp_path, "vev") == EXIT_USAGE


def test_hamiltonian_prints_golden_form(tmp_path, capsys):
    assert _run(tmp_path, "hamiltonian") == EXIT_OK
    output = capsys.readouterr().out
    assert f"H (one mode, hbar w = 1) = {GOLDEN_PAPER_HAMILTONIAN}" in output
    assert "H in b operators" in output


def test_all_sections(tmp_path):
    assert _run(tmp_path, "all", config=_config(tmp_path)) == EXIT_OK
    report = load_report(tmp_path / "out" / "report.json")
    assert set(report.sections) == {"vacuum_energy", "verify_commutators", "causality", "vev"}
    assert report.command == "all"
    assert report.config["n_max"] == 2


def test_config_errors_exit_with_usage(tmp_path):
    assert _run(tmp_path, "vacuum-energy", config=tmp_path / "missing.json") == EXIT_USAGE
    bad = _config(tmp_path, scheme={"kind": "paper", "n": ["1/2", "1/2", "1/2"]})
    assert _run(tmp_path, "vacuum-energy", config=bad) == EXIT_USAGE


def test_unknown_scheme_flag():
    with pytest.raises(SystemExit) as info:
        main(["--scheme", "bogus", "all"])
    assert info.value.code == 2


if __name__ == "__main__":
    import sys
    sys.exit(main(["all"]))
