"""
Output templates for nematic-colloids reports.
"""
from typing import Any, Dict, List, Sequence

from .components import ColloidComponents
from .formatters import ColloidFormatters
from .theme import ColloidTheme


def _heading(section: str, title: str) -> str:
    return f"{ColloidTheme.get_section_marker(section)} {title}"


class ColloidTemplates:
    """Report templates; every template returns deterministic text."""

    @staticmethod
    def moments(entries: List[Dict[str, Any]], order: int) -> str:
        """Template for area and moment tabulation.

        Args:
            entries: One dict per shape with name, area, reference_area,
                     moment, reference_moment and delta

        Returns:
            Formatted moments report
        """
        fmt = ColloidFormatters.format_float
        rows = [
            [e["name"], fmt(e["area"], 10), fmt(e["reference_area"], 10), fmt(e["delta"], 3)]
            for e in entries
        ]
        result = [
            _heading("moments", f"Surface moments (Gauss-Legendre order {order})"),
            "",
            ColloidComponents.create_table(["shape", "area", "analytic area", "max delta"], rows),
        ]
        for e in entries:
            result.extend([
                "",
                f"{e['name']}: quadrature moment",
                ColloidFormatters.format_matrix(e["moment"], 10),
                f"{e['name']}: analytic moment",
                ColloidFormatters.format_matrix(e["reference_moment"], 10),
            ])
        return "\n".join(result)

    @staticmethod
    def design(summary: Dict[str, Any]) -> str:
        """Template for an inverse design summary."""
        fmt = ColloidFormatters.format_float
        coefficient_rows = [
            [str(k), fmt(a), fmt(i), str(n)]
            for k, (a, i, n) in enumerate(
                zip(summary["coefficients"], summary["intensities"], summary["component_counts"]),
                start=1,
            )
        ]
        grid = ColloidComponents.create_key_value_grid({
            "strength W": fmt(summary["strength"]),
            "a": fmt(summary["a"]),
            "a'": fmt(summary["a_prime"]),
            "alpha_P": fmt(summary["alpha_p"]),
            "spherical coefficient": fmt(summary["spherical_coefficient"]),
            "constant offset": fmt(summary["constant_offset"]),
            "reconstruction residual": fmt(summary["reconstruction_residual"], 3),
            "contract variance": fmt(summary["contract_variance"], 3),
            "species": str(summary["species_count"]),
        })
        result = [
            _heading("design", "Colloid design for (a' - a) tr Q^2 + W tr(QP)"),
            "",
            "Target P:",
            ColloidFormatters.format_matrix(summary["target"]),
            "",
            ColloidComponents.create_table(
                ["k", "a_k", "intensity i_k", "components"], coefficient_rows, title="Assemblies"
            ),
            "",
            grid,
        ]
        if summary.get("path"):
            result.extend(["", f"Design configuration written to {summary['path']}"])
        return "\n".join(result)

    @staticmethod
    def energy(report: Dict[str, Any], outputs: Dict[str, str]) -> str:
        """Template for an energy report with the files written alongside."""
        fmt = ColloidFormatters.format_float
        status = "ok" if report["converged"] else f"unconverged: {report['message']}"
        grid = ColloidComponents.create_key_value_grid({
            "elastic": fmt(report["elastic"], 12),
            "bulk": fmt(report["bulk"], 12),
            "homogenised": fmt(report["homogenised"], 12),
            "surface": fmt(report["surface"], 12),
            "total": fmt(report["total"], 12),
            "iterations": str(report["iterations"]),
            "grad norm": fmt(report["grad_norm"], 3),
            "status": ColloidFormatters.format_status(status),
        })
        result = [_heading("energy", "Energy report"), "", grid]
        if outputs:
            result.extend(["", "Outputs:"])
            result.extend(f"  {name}: {path}" for name, path in outputs.items())
        return "\n".join(result)

    @staticmethod
    def fhom(summary: Dict[str, Any]) -> str:
        fmt = ColloidFormatters.format_float
        grid = ColloidComponents.create_key_value_grid({
            "rows": str(summary["rows"]),
            "species": str(summary["species"]),
            "min f_hom": fmt(summary["min"]),
            "max f_hom": fmt(summary["max"]),
            "output": summary["path"],
        })
        return "\n".join([_heading("potential", "Homogenised potential table"), "", grid])

    @staticmethod
    def sweep(rows: Sequence[Any], flat_norm_constant: float, path: str) -> str:
        """Template for the homogenisation sweep table."""
        fmt = ColloidFormatters.format_float
        table_rows = [
            [
                f"{r.eps:.6g}",
                str(r.n_eps),
                fmt(r.f_eps),
                fmt(r.delta_f, 3),
                fmt(r.l2_error, 3),
                fmt(r.h1_error, 3),
                fmt(r.constraint_residual, 3),
                fmt(r.scaled_surface, 3),
                fmt(r.flat_norm, 3),
                ColloidFormatters.format_status(r.status),
            ]
            for r in rows
        ]
        headers = [
            "eps", "N", "F_eps", "|dF|", "L2 err", "H1 err", "residual", "eps^g surf", "flat norm", "status"
        ]
        return "\n".join([
            _heading("sweep", "Homogenisation sweep"),
            "",
            ColloidComponents.create_table(headers, table_rows),
            "",
            f"flat-norm constant (max estimate/eps): {fmt(flat_norm_constant, 4)}",
            f"CSV written to {path}",
        ])

    @staticmethod
    def selftest(checks: List[Dict[str, Any]], seed: int) -> str:
        """Template for the acceptance self-test; one row per check."""
        rows = [[c["name"], ColloidFormatters.format_check(c["passed"]), c["detail"]] for c in checks]
        passed = sum(1 for c in checks if c["passed"])
        return "\n".join([
            _heading("selftest", f"Self-test (seed {seed})"),
            "",
            ColloidComponents.create_table(["check", "result", "detail"], rows),
            "",
            f"{passed}/{len(checks)} checks passed",
        ])
