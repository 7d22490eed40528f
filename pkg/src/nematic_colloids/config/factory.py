"""
Construction of domain objects from a validated RunConfig.
"""
import importlib
from pathlib import Path
from typing import Any, Callable, List, Optional

import numpy as np

from ..core.energy import (
    BulkParams,
    CustomSurfaceDensity,
    ElasticParams,
    RapiniPapoular,
    SphericalQuadratic,
    SurfaceDensity,
)
from ..core.homogenize import (
    DensityBox,
    DensityField,
    DesignSpec,
    RotationField,
    SpeciesSpec,
    design_linear_term,
)
from ..core.shapes import lookup, transform
from ..core.solver import (
    BoundaryData,
    Box,
    ConstantBoundary,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    UniaxialBoundary,
)
from ..core.sweep import SweepOptions
from .models import (
    BoundaryConfig,
    DensityConfig,
    RotationConfig,
    RunConfig,
    SpeciesConfig,
    SurfaceConfig,
)


def import_callable(path: str) -> Callable[..., Any]:
    """Resolve "package.module:function".

    Raises:
        ValueError: If the module or attribute does not exist
    """
    module_name, _, attribute = path.partition(":")
    try:
        module = importlib.import_module(module_name)
        return getattr(module, attribute)
    except (ImportError, AttributeError) as e:
        raise ValueError(f"Unknown resource: cannot import {path!r} ({e})")


def build_container(config: RunConfig) -> Box:
    return Box(tuple(config.container.lower), tuple(config.container.upper))


def build_grid(config: RunConfig) -> GridSpec:
    return GridSpec(build_container(config), config.container.shape)


def build_params(config: RunConfig) -> MaterialParams:
    return MaterialParams(
        elastic=ElasticParams(config.elastic.L1, config.elastic.L2, config.elastic.L3),
        bulk=BulkParams(config.bulk.a, config.bulk.b, config.bulk.c),
    )


def build_surface(config: SurfaceConfig) -> SurfaceDensity:
    if config.kind == "rapini_papoular":
        return RapiniPapoular(config.strength)
    if config.kind == "spherical_quadratic":
        return SphericalQuadratic(config.coefficient)
    return CustomSurfaceDensity(
        function=import_callable(config.function),
        gradient=import_callable(config.gradient) if config.gradient else None,
        bounded_below=config.bounded_below,
        even=config.even,
        name=config.function,
    )


def build_rotation(config: RotationConfig) -> RotationField:
    if config.kind == "identity":
        return RotationField.identity()
    if config.kind == "twist":
        return RotationField.twist(config.axis, config.rate)
    if config.rotvec is not None:
        return RotationField.from_rotvec(config.rotvec)
    return RotationField.constant(np.asarray(config.matrix, dtype=float))


def build_density(config: DensityConfig) -> DensityField:
    boxes = [DensityBox(tuple(b.lower), tuple(b.upper), b.value) for b in config.boxes]
    return DensityField(config.value, boxes)


def build_species(config: SpeciesConfig) -> SpeciesSpec:
    """A species whose body is scale · P + translation for the catalogue body P."""
    shape = lookup(config.shape)
    if config.scale != 1.0 or any(config.translation):
        shape = transform(shape, np.eye(3), config.scale, config.translation)
    return SpeciesSpec(
        shape=shape,
        surface=build_surface(config.surface),
        rotation=build_rotation(config.rotation),
        density=build_density(config.density),
        name=config.name or config.shape,
    )


def build_design(config: RunConfig) -> Optional[DesignSpec]:
    if config.design is None:
        return None
    return design_linear_term(
        np.asarray(config.design.target, dtype=float),
        config.design.strength,
        config.bulk.a,
        config.design.a_prime,
        config.design.order,
    )


def build_species_list(config: RunConfig, design: Optional[DesignSpec] = None) -> List[SpeciesSpec]:
    """Configured species, followed by the species of `design` when given."""
    species = [build_species(s) for s in config.species]
    if design is not None:
        species.extend(design.species())
    return species


def build_boundary(config: BoundaryConfig) -> BoundaryData:
    if config.kind == "constant":
        return ConstantBoundary(config.q)
    return UniaxialBoundary(
        order=config.order,
        director=config.director,
        direction=config.direction,
        wavenumber=config.wavenumber,
        centre=config.centre,
        core_radius=config.core_radius,
    )


def build_minimize_options(config: RunConfig) -> MinimizeOptions:
    solver = config.solver
    return MinimizeOptions(
        method=solver.method,
        max_iterations=solver.max_iterations,
        gtol=solver.gtol,
        ftol=solver.ftol,
        memory=solver.memory,
    )


def build_sweep_options(config: RunConfig) -> SweepOptions:
    sweep = config.sweep
    return SweepOptions(
        eps_list=tuple(sweep.eps),
        alpha=sweep.alpha,
        gamma=sweep.gamma,
        resolution_factor=sweep.resolution_factor,
        max_resolution=sweep.max_resolution,
        solver=build_minimize_options(config),
        init=config.solver.init,
        order=config.solver.order,
        flat_norm_tests=sweep.flat_norm_tests,
        seed=config.seed,
        threads=config.threads,
        report_timing=sweep.report_timing,
        dump_dir=Path(config.output.directory) / "fields" if sweep.dump_fields else None,
    )
