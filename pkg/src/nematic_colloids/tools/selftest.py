"""
Deterministic acceptance checks with a PASS/FAIL report.

Every check runs at reduced size so the whole suite finishes in well under
a minute; `with_sweep` adds the homogenisation trend and the strong
anchoring sweep, which take minutes.
Check details print numbers at fixed precision so that two runs with the
same seed produce identical reports.
"""
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from ..core.colloid import ColloidConfig, build_lattice, j_eps, j_tilde_eps, j_zero
from ..core.energy import (
    BulkParams,
    ElasticParams,
    RapiniPapoular,
    SphericalQuadratic,
    f_bulk,
    f_bulk_grad,
    f_elastic,
    f_elastic_grad,
)
from ..core.homogenize import (
    SpeciesSpec,
    closed_form_fhom,
    decompose_in_mk,
    design_linear_term,
    f_hom,
    f_hom_grad,
    f_hom_j,
    reconstruct_from_mk,
)
from ..core.qtensor import deviatoric, sample_coefficients
from ..core.recovery import flat_norm_estimate, l2_norm, mollify_recovery, recovery_rate
from ..core.shapes import (
    ASSEMBLY_LAYOUT,
    Shape,
    assembly,
    catalogue_names,
    lookup,
    m_k,
    reference_area,
    reference_moment,
    transform,
)
from ..core.solver import (
    Box,
    ConstantBoundary,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    TensorField,
    UniaxialBoundary,
    energy_f0,
    energy_grad_f0,
    minimize,
)
from ..core.sweep import SweepOptions, run_sweep
from .base import ColloidTool

Check = Dict[str, Any]

TREND_EPS = (0.25, 1.0 / 6.0, 0.125)
TREND_ALPHA = 1.2
STRONG_GAMMA = 0.1
INCLUSION_SCALE = 0.25
FD_STEP = 1e-6
FD_DIRECTIONS = 10


def trend_field(points: np.ndarray) -> np.ndarray:
    """A smooth closed-form field with nonzero gradient everywhere on the unit box."""
    x, y, z = np.moveaxis(np.asarray(points, dtype=float), -1, 0)
    return 0.3 * np.stack(
        [np.sin(np.pi * x), np.cos(np.pi * y), 0.5 * np.sin(np.pi * z), x * y, 0.2 + 0.5 * z],
        axis=-1,
    )


def _scaled(name: str) -> Shape:
    """Catalogue body shrunk so inclusions stay disjoint down to eps = 1/4."""
    return transform(lookup(name), np.eye(3), INCLUSION_SCALE)


def _check(name: str, passed: bool, detail: str) -> Check:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _spread(values: List[float]) -> float:
    """max/min of a positive sequence; inf when any entry is not positive."""
    low = min(values)
    return max(values) / low if low > 0.0 else float("inf")


def _relative_fd_error(
    func: Callable[[np.ndarray], float], grad: np.ndarray, x: np.ndarray, rng: np.random.Generator
) -> float:
    worst = 0.0
    for _ in range(FD_DIRECTIONS):
        direction = rng.normal(size=x.shape)
        direction /= np.linalg.norm(direction)
        fd = (func(x + FD_STEP * direction) - func(x - FD_STEP * direction)) / (2.0 * FD_STEP)
        analytic = float(np.sum(grad * direction))
        worst = max(worst, abs(fd - analytic) / max(1.0, abs(analytic)))
    return worst


class SelftestTools(ColloidTool):
    """Reduced acceptance suite; each check records a detail string."""

    def check_moments(self) -> Check:
        worst = 0.0
        for name in catalogue_names():
            nodes = lookup(name).nodes(32)
            worst = max(
                worst,
                float(np.max(np.abs(nodes.moment - reference_moment(name).matrix))),
                abs(nodes.area - reference_area(name)),
            )
        return _check("surface moments", worst < 1e-8, f"max deviation {worst:.3e} (tol 1e-08)")

    def check_basis(self, rng: np.random.Generator) -> Check:
        identity_error = float(
            np.max(np.abs((m_k(1) + m_k(2) + m_k(3)).matrix - 2.0 * np.pi * np.eye(3)))
        )
        worst = 0.0
        for _ in range(100):
            a = rng.normal(size=(3, 3))
            p = 0.5 * (a + a.T)
            residual = reconstruct_from_mk(decompose_in_mk(p)).matrix - p
            worst = max(worst, float(np.max(np.abs(residual))))
        passed = identity_error < 1e-10 and worst < 1e-10
        return _check(
            "moment basis",
            passed,
            f"M1+M2+M3-2pi Id {identity_error:.3e}, decomposition residual {worst:.3e}",
        )

    def check_closed_form(self, rng: np.random.Generator, samples: int = 100) -> Check:
        worst = 0.0
        for k in ASSEMBLY_LAYOUT:
            species = SpeciesSpec(shape=assembly(k), surface=RapiniPapoular(1.0))
            for q in sample_coefficients(rng, samples, max_norm=3.0):
                gap = abs(closed_form_fhom(k, q) - f_hom_j(species, q, (0.0, 0.0, 0.0), 32))
                worst = max(worst, gap / (1.0 + float(q @ q)))
        return _check("closed form", worst < 1e-6, f"max scaled gap {worst:.3e} (tol 1e-06)")

    def check_design(self, rng: np.random.Generator, designs: int = 20, samples: int = 100) -> Check:
        worst = 0.0
        for _ in range(designs):
            a = rng.normal(size=(3, 3))
            p = 0.5 * (a + a.T)
            strength = float(rng.uniform(0.1, 2.0))
            bulk_a = float(rng.uniform(-1.0, 1.0))
            a_prime = float(rng.uniform(0.5, 2.0))
            spec = design_linear_term(p, strength, bulk_a, a_prime)
            gaps = [spec.total_fhom(q) - spec.target_fhom(q) for q in sample_coefficients(rng, samples)]
            worst = max(worst, float(np.var(gaps)))
        return _check("design contract", worst < 1e-10, f"max residual variance {worst:.3e} (tol 1e-10)")

    def check_gradients(self, rng: np.random.Generator) -> Check:
        elastic = ElasticParams(1.0, 0.3, 0.2)
        bulk = BulkParams(-0.2, 0.5, 1.0)
        errors = {}

        d = rng.normal(size=(3, 5))
        errors["elastic"] = _relative_fd_error(
            lambda v: float(f_elastic(v, elastic)), f_elastic_grad(d, elastic), d, rng
        )
        q = rng.normal(size=5) * 0.5
        errors["bulk"] = _relative_fd_error(lambda v: float(f_bulk(v, bulk)), f_bulk_grad(q, bulk), q, rng)

        species = [
            SpeciesSpec(shape=lookup("wedge+12"), surface=RapiniPapoular(0.7)),
            SpeciesSpec(shape=lookup("ball"), surface=SphericalQuadratic(1.3)),
        ]
        errors["f_hom"] = _relative_fd_error(
            lambda v: f_hom(species, v), f_hom_grad(species, q).coeffs, q, rng
        )

        grid = GridSpec(Box(), (5, 5, 5))
        boundary = UniaxialBoundary(0.4, director="twist", wavenumber=1.5)
        field = TensorField.from_boundary(grid, boundary)
        interior = ~field.boundary_mask
        noisy = field.values.copy()
        noisy[interior] += 0.05 * rng.normal(size=noisy[interior].shape)
        field = field.with_values(noisy)
        params = MaterialParams(elastic, bulk)
        grad = energy_grad_f0(field, params, species, order=16)[interior].ravel()

        def total(x: np.ndarray) -> float:
            return energy_f0(field.with_interior(x), params, species, order=16).total

        errors["F0"] = _relative_fd_error(total, grad, field.interior_vector(), rng)
        worst = max(errors.values())
        detail = ", ".join(f"{name} {value:.3e}" for name, value in errors.items())
        return _check("gradient exactness", worst < 1e-5, detail)

    def check_effective_field(self, resolution: int = 16) -> Check:
        strength, bulk_a, a_prime = 0.3, 0.5, 1.0
        p = np.diag([1.0, 0.0, 0.0])
        spec = design_linear_term(p, strength, bulk_a, a_prime)
        expected = -(strength / (2.0 * a_prime)) * deviatoric(p).coeffs
        grid = GridSpec(Box(), (resolution,) * 3)
        start = TensorField.from_boundary(grid, ConstantBoundary(expected), init="constant")
        params = MaterialParams(ElasticParams(), BulkParams(bulk_a, 0.0, 1e-6))
        field, report = minimize(
            start, params, options=MinimizeOptions(gtol=1e-10), potential=spec.potential(drop_constant=True)
        )
        error = float(np.max(np.abs(field.values - expected)))
        return _check(
            "effective field",
            error < 1e-4,
            f"sup error {error:.3e} after {report.iterations} iterations (tol 1e-04)",
        )

    def check_j_trend(self) -> Check:
        species = [SpeciesSpec(shape=_scaled("wedge+12"), surface=RapiniPapoular(1.0))]
        box = Box()
        j0 = j_zero(trend_field, species, container=box)
        gaps, ratios = [], []
        for eps in TREND_EPS:
            lattice = build_lattice(ColloidConfig(TREND_ALPHA, eps), species, box)
            j = j_eps(trend_field, lattice)
            gaps.append(abs(j - j0))
            ratios.append(abs(j - j_tilde_eps(trend_field, lattice)) / eps**TREND_ALPHA)
        decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
        spread = _spread(ratios)
        return _check(
            "surface functional trend",
            decreasing and spread < 3.0,
            "|J_eps - J0| " + " ".join(f"{g:.3e}" for g in gaps) + f"; ratio spread {spread:.3f} (tol 3)",
        )

    def check_flat_norm(self) -> Check:
        species = [SpeciesSpec(shape=_scaled("ball"), surface=RapiniPapoular(1.0))]
        estimates = []
        for eps in TREND_EPS:
            lattice = build_lattice(ColloidConfig(TREND_ALPHA, eps), species, Box())
            estimates.append(flat_norm_estimate(lattice, 16, self.config.seed))
        constant = max(e / eps for e, eps in zip(estimates, TREND_EPS))
        return _check(
            "flat norm",
            constant <= 3.0,
            "estimates " + " ".join(f"{e:.3e}" for e in estimates) + f"; lambda {constant:.3f} (tol 3)",
        )

    def check_recovery(self, resolution: int = 16) -> Check:
        grid = GridSpec(Box(), (resolution,) * 3)
        coords = grid.coordinates()
        bump = np.prod(np.sin(np.pi * coords), axis=-1)
        values = bump[..., None] * np.array([1.0, 0.5, -0.3, 0.2, 0.1])
        field = TensorField(grid, values, ConstantBoundary(np.zeros(5)))
        h = float(np.max(grid.spacing))
        boundary_error = 0.0
        ratios = []
        for factor in (2.0, 4.0, 8.0):
            sigma = factor * h
            recovered = mollify_recovery(field, sigma)
            boundary_error = max(
                boundary_error,
                float(np.max(np.abs(recovered.values[field.boundary_mask] - field.boundary_values))),
            )
            ratios.append(l2_norm(field, field.values - recovered.values) / sigma)

        species = [SpeciesSpec(shape=_scaled("ball"), surface=SphericalQuadratic(1.0))]
        rates = [
            recovery_rate(field, build_lattice(ColloidConfig(TREND_ALPHA, eps), species, Box()))
            for eps in TREND_EPS
        ]
        ratio_spread, rate_spread = _spread(ratios), _spread(rates)
        passed = boundary_error == 0.0 and ratio_spread < 3.0 and rate_spread < 3.0
        return _check(
            "recovery",
            passed,
            f"boundary error {boundary_error:.1e}; L2/sigma "
            + " ".join(f"{r:.3e}" for r in ratios)
            + f" (spread {ratio_spread:.3f}); rate "
            + " ".join(f"{r:.3e}" for r in rates)
            + f" (spread {rate_spread:.3f}, tol 3)",
        )

    def check_homogenisation_trend(self) -> Check:
        species = [SpeciesSpec(shape=_scaled("ball"), surface=RapiniPapoular(1.0))]
        options = SweepOptions(
            eps_list=TREND_EPS,
            alpha=TREND_ALPHA,
            max_resolution=self.config.sweep.max_resolution,
            solver=MinimizeOptions(gtol=1e-7),
            seed=self.config.seed,
            threads=self.config.threads,
        )
        params = MaterialParams(ElasticParams(), BulkParams(-0.2, 0.0, 1.0))
        boundary = UniaxialBoundary(0.4, director="twist", wavenumber=1.0)
        result = run_sweep(Box(), boundary, params, species, options)
        delta = result.column("delta_f")
        l2 = result.column("l2_error")
        ok = all(r.ok for r in result.rows)
        nonincreasing = all(b <= a for col in (delta, l2) for a, b in zip(col, col[1:]))
        return _check(
            "homogenisation trend",
            ok and nonincreasing,
            "|dF| " + " ".join(f"{v:.3e}" for v in delta) + "; L2 " + " ".join(f"{v:.3e}" for v in l2),
        )

    def check_strong_anchoring(self) -> Check:
        # f_hom = |Q|²/3 vanishes at Q = 0, so the constraint set is nonempty
        species = [SpeciesSpec(shape=_scaled("ball"), surface=SphericalQuadratic(1.0))]
        options = SweepOptions(
            eps_list=TREND_EPS,
            alpha=TREND_ALPHA,
            gamma=STRONG_GAMMA,
            max_resolution=self.config.sweep.max_resolution,
            solver=MinimizeOptions(gtol=1e-7),
            seed=self.config.seed,
            threads=self.config.threads,
        )
        params = MaterialParams(ElasticParams(), BulkParams(-0.2, 0.0, 1.0))
        boundary = UniaxialBoundary(0.4, director="twist", wavenumber=1.0)
        result = run_sweep(Box(), boundary, params, species, options)
        residual = result.column("constraint_residual")
        surface = result.column("scaled_surface")
        ok = all(r.ok for r in result.rows)
        decreasing = all(b < a for a, b in zip(residual, residual[1:]))
        spread = _spread(surface) if ok else float("inf")
        return _check(
            "strong anchoring",
            ok and decreasing and spread < 3.0,
            "residual "
            + " ".join(f"{v:.3e}" for v in residual)
            + f"; eps^gamma surface spread {spread:.3f} (tol 3)",
        )

    def run_checks(self, with_sweep: bool = False) -> List[Check]:
        rng = np.random.default_rng(self.config.seed)
        checks: List[Tuple[str, Callable[[], Check]]] = [
            ("surface moments", self.check_moments),
            ("moment basis", lambda: self.check_basis(rng)),
            ("closed form", lambda: self.check_closed_form(rng)),
            ("design contract", lambda: self.check_design(rng)),
            ("gradient exactness", lambda: self.check_gradients(rng)),
            ("effective field", self.check_effective_field),
            ("surface functional trend", self.check_j_trend),
            ("flat norm", self.check_flat_norm),
            ("recovery", self.check_recovery),
        ]
        if with_sweep:
            checks.append(("homogenisation trend", self.check_homogenisation_trend))
            checks.append(("strong anchoring", self.check_strong_anchoring))
        results = []
        for name, check in checks:
            try:
                results.append(check())
            except (ValueError, RuntimeError) as e:
                self.logger.error("check %s raised: %s", name, e)
                results.append(_check(name, False, f"error: {e}"))
        return results

    def selftest(self, with_sweep: bool = False) -> str:
        """Run the acceptance checks.

        Returns:
            PASS/FAIL report; identical across runs with the same seed
        """
        try:
            checks = self.run_checks(with_sweep)
            failed = [c["name"] for c in checks if not c["passed"]]
            if failed:
                self.logger.warning("self-test failures: %s", ", ".join(failed))
            return self._format_response(checks, "selftest", seed=self.config.seed)
        except Exception as e:
            self._handle_error("run self-test", e)
