"""
Tests for the command-line entry point.
"""
from unittest.mock import patch

import pytest

from nematic_colloids.cli import EXIT_INPUT, EXIT_OK, EXIT_RUNTIME, build_parser, categorise, main, run


def test_parser_reads_global_options():
    """Test global options precede the subcommand."""
    argv = ["--threads", "2", "--seed", "5", "design", "--target", "1,0,0,0,0,0"]
    args = build_parser().parse_args(argv + ["--strength", "1", "--a-prime", "2"])
    assert (args.threads, args.seed, args.command) == (2, 5, "design")
    assert args.target == [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    assert args.a is None


def test_parser_rejects_bad_numbers():
    """Test malformed target lists exit through argparse."""
    with pytest.raises(SystemExit):
        build_parser().parse_args(["design", "--target", "1,x", "--strength", "1", "--a-prime", "1"])


def test_categorise():
    """Test categories, stripped prefixes and exit codes."""
    assert categorise(ValueError("Unknown resource: shape 'cube'")) == (
        "unknown-resource",
        "shape 'cube'",
        EXIT_INPUT,
    )
    assert categorise(ValueError("Invalid input: bad target")) == ("invalid-input", "bad target", EXIT_INPUT)
    assert categorise(RuntimeError("diverged")) == ("runtime", "diverged", EXIT_RUNTIME)


def test_moments_prints_report(output_env, capsys):
    """Test a successful command prints its report on stdout and returns 0."""
    assert run(["moments", "ball", "--order", "16"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Surface moments (Gauss-Legendre order 16)" in out
    assert "ball" in out


def test_unknown_shape_is_unknown_resource(output_env, capsys):
    """Test an unknown catalogue name exits 2 and ends stderr with the error line."""
    assert run(["moments", "cube"]) == EXIT_INPUT
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith("error: unknown-resource: Unknown shape")


def test_missing_config_is_unknown_resource(output_env, tmp_path, capsys):
    """Test a missing configuration file exits 2."""
    assert run(["--config", str(tmp_path / "absent.yaml"), "moments"]) == EXIT_INPUT
    assert "error: unknown-resource: configuration file" in capsys.readouterr().err


def test_invalid_config_is_invalid_input(output_env, tmp_path, capsys):
    """Test a configuration violating a modelling assumption exits 2."""
    path = tmp_path / "run.yaml"
    path.write_text("schema_version: 1\nbulk:\n  c: -1.0\n")
    assert run(["--config", str(path), "moments"]) == EXIT_INPUT
    assert "error: invalid-input: " in capsys.readouterr().err


def test_runtime_failure_exits_one(output_env, capsys):
    """Test unexpected failures exit 1."""
    with patch("nematic_colloids.cli.dispatch", side_effect=RuntimeError("Failed to run sweep: boom")):
        assert run(["sweep"]) == EXIT_RUNTIME
    assert capsys.readouterr().err == "error: runtime: Failed to run sweep: boom\n"


def test_design_command_writes_config(output_env, capsys):
    """Test the design subcommand writes design.json into the output directory."""
    code = run(["design", "--target", "1,0,0,0,0,0", "--strength", "0.3", "--a", "0.5", "--a-prime", "1"])
    assert code == EXIT_OK
    assert (output_env / "design.json").exists()
    assert "Colloid design" in capsys.readouterr().out


def test_main_exits_with_code(output_env):
    """Test main() exits with the command's code."""
    with patch("sys.argv", ["nematic-colloids", "moments", "cube"]):
        with pytest.raises(SystemExit) as exc:
            main()
    assert exc.value.code == EXIT_INPUT
