"""
Tests for the subcommand tools and the toolkit.
"""
import csv
import json

import numpy as np
import pytest

from nematic_colloids.config import RunConfig, load_config
from nematic_colloids.core.fieldio import read_field
from nematic_colloids.core.homogenize import design_linear_term
from nematic_colloids.tools import (
    DesignTools,
    MinimizeTools,
    MomentTools,
    PotentialTools,
    SelftestTools,
    SweepTools,
)
from nematic_colloids.tools.base import ColloidTool
from nematic_colloids.tools.design import parse_target
from nematic_colloids.toolkit import ColloidToolkit, apply_overrides


@pytest.fixture
def run_config(output_env):
    """Fixture providing a small configuration writing into the temporary output directory."""
    return RunConfig(
        schema_version=1,
        container={"resolution": 6},
        bulk={"a": -0.2, "b": 0.0, "c": 1.0},
        species=[{"shape": "ball", "scale": 0.25, "surface": {"strength": 0.5}}],
        boundary={"kind": "uniaxial", "order": 0.4, "director": "twist", "wavenumber": 1.0},
        solver={"max_iterations": 300, "gtol": 1e-6},
        sweep={"eps": [0.5, 0.25], "alpha": 1.2, "max_resolution": 7},
        output={"directory": str(output_env)},
        seed=3,
    )


@pytest.fixture
def samples_csv(tmp_path):
    """Fixture writing three Q samples without points."""
    path = tmp_path / "samples.csv"
    path.write_text("q1,q2,q3,q4,q5\n0,0,0,0,0\n0.1,0.2,0,0,0\n0.3,0,-0.1,0.2,0\n")
    return path


def test_parse_target():
    """Test 6-entry and 9-entry targets."""
    p = parse_target([1, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(p, [[1, 4, 5], [4, 2, 6], [5, 6, 3]])
    np.testing.assert_array_equal(parse_target(range(9)), np.arange(9).reshape(3, 3))
    with pytest.raises(ValueError, match="6 or 9 entries"):
        parse_target([1, 2, 3])


def test_moment_table(run_config):
    """Test quadrature moments agree with the analytic ones."""
    tools = MomentTools(run_config)
    entries = tools.tabulate(["ball", "wedge+12"])
    assert [e["name"] for e in entries] == ["ball", "wedge+12"]
    assert max(e["delta"] for e in entries) < 1e-8
    report = tools.moments(["ball"])
    assert "Surface moments (Gauss-Legendre order 32)" in report
    with pytest.raises(ValueError, match="Unknown resource"):
        tools.moments(["cube"])


def test_design_writes_loadable_configs(run_config, output_env):
    """Test design.json reproduces the design and design_species.json lists its species."""
    report = DesignTools(run_config).design([1, 0, 0, 0, 0, 0], strength=0.3, a_prime=1.0, a=0.5)
    assert "Assemblies" in report
    assert "design.json" in report
    design = load_config(str(output_env / "design.json"))
    assert design.bulk.a == 0.5
    assert design.design.strength == 0.3
    explicit = json.loads((output_env / "design_species.json").read_text())
    spec = design_linear_term(np.diag([1.0, 0.0, 0.0]), 0.3, 0.5, 1.0)
    assert len(explicit["species"]) == len(spec.components) + 1
    assert len(load_config(str(output_env / "design_species.json")).species) == len(spec.components) + 1


def test_design_rejects_bad_target(run_config):
    """Test malformed targets are reported as invalid input."""
    with pytest.raises(ValueError, match="Invalid input: target needs 6 or 9 entries"):
        DesignTools(run_config).design([1, 2], strength=1.0, a_prime=1.0)


def test_design_contract_variance_is_small(run_config):
    """Test the seeded contract check of a design."""
    spec = design_linear_term(np.eye(3), 1.0, 0.5, 2.0)
    assert DesignTools(run_config).contract_variance(spec) < 1e-10


def test_fhom_table(run_config, samples_csv, output_env):
    """Test f_hom rows for the configured species at the container centre."""
    tools = PotentialTools(run_config)
    report = tools.fhom(str(samples_csv))
    assert "Homogenised potential table" in report
    with (output_env / "fhom.csv").open() as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 3
    assert float(rows[0]["x"]) == pytest.approx(0.5)
    q = np.array([[float(r[f"q{i}"]) for i in range(1, 6)] for r in rows])
    points = np.full((3, 3), 0.5)
    values, grads, count = tools.evaluate(q, points)
    assert count == 1
    np.testing.assert_allclose([float(r["fhom"]) for r in rows], values, rtol=1e-11)
    np.testing.assert_allclose(float(rows[2]["grad1"]), grads[2, 0], rtol=1e-11)


def test_fhom_input_errors(run_config, tmp_path):
    """Test a missing file and a missing column are categorised."""
    tools = PotentialTools(run_config)
    with pytest.raises(ValueError, match="Unknown resource"):
        tools.fhom(str(tmp_path / "absent.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("q1,q2\n0,0\n")
    with pytest.raises(ValueError, match="Invalid input: input CSV lacks columns"):
        tools.fhom(str(bad))


def test_minimize_writes_outputs(run_config, output_env):
    """Test the minimiser writes a loadable dump, a slice and a trace."""
    report = MinimizeTools(run_config).minimize()
    assert "Energy report" in report
    dump = read_field(output_env / "field.qtf")
    assert dump.grid.shape == (6, 6, 6)
    assert (output_env / "slice.csv").exists()
    trace = (output_env / "trace.csv").read_text().splitlines()
    assert trace[0] == "iteration,energy"
    assert len(trace) >= 2


def test_sweep_writes_csv(run_config, output_env):
    """Test the sweep tool writes one row per ε."""
    report = SweepTools(run_config).sweep()
    assert "Homogenisation sweep" in report
    lines = (output_env / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("eps,gamma,n_eps")


def test_quick_selftest_checks(run_config, rng):
    """Test the fast acceptance checks pass."""
    tools = SelftestTools(run_config)
    for check in (tools.check_moments(), tools.check_basis(rng)):
        assert check["passed"], check


def test_sampled_checks_run_at_full_size(run_config, rng):
    """Test the closed-form and design checks pass with their default sample counts."""
    tools = SelftestTools(run_config)
    closed_form = tools.check_closed_form(rng)
    design = tools.check_design(rng)
    assert closed_form["passed"], closed_form
    assert design["passed"], design


@pytest.mark.slow
def test_selftest_is_deterministic(run_config):
    """Test two self-test runs with one seed produce identical passing reports."""
    first = SelftestTools(run_config).selftest()
    assert first == SelftestTools(run_config).selftest()
    assert "9/9 checks passed" in first


def test_handle_error_categories(run_config):
    """Test errors are mapped to unknown-resource, invalid-input and runtime."""
    tool = ColloidTool(run_config)
    with pytest.raises(ValueError, match="^Unknown resource: "):
        tool._handle_error("read", FileNotFoundError("missing.csv"))
    with pytest.raises(ValueError, match="^Unknown resource: Unknown shape"):
        tool._handle_error("look up", ValueError("Unknown shape 'cube'"))
    with pytest.raises(ValueError, match="^Invalid input: bad"):
        tool._handle_error("parse", ValueError("bad"))
    with pytest.raises(RuntimeError, match="^Failed to solve: singular"):
        tool._handle_error("solve", ArithmeticError("singular"))


def test_apply_overrides_revalidates(run_config):
    """Test command-line overrides go through validation."""
    config = apply_overrides(run_config, threads=4, seed=9, output_dir="elsewhere", log_level=None)
    assert (config.threads, config.seed, config.output.directory) == (4, 9, "elsewhere")
    assert config.logging.level == run_config.logging.level
    with pytest.raises(ValueError):
        apply_overrides(run_config, threads=0)


def test_toolkit_wiring(clean_env, tmp_path):
    """Test the toolkit loads, overrides and builds every tool."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"schema_version": 1, "seed": 4}))
    toolkit = ColloidToolkit(config_path=str(path), output_dir=str(tmp_path / "out"), log_level="ERROR")
    assert toolkit.config.seed == 4
    assert toolkit.config.output.directory == str(tmp_path / "out")
    assert isinstance(toolkit.sweep_tools, SweepTools)
    with pytest.raises(ValueError, match="Unknown resource: configuration file"):
        ColloidToolkit(config_path=str(tmp_path / "absent.yaml"))
