"""
Configuration models for nematic-colloids runs.

This module defines Pydantic models for run configuration validation:
- Container box and grid resolution
- Elastic and bulk material constants
- Colloid species (shape, rotation field, density, anchoring)
- Dirichlet boundary data
- Design targets, solver options and sweep parameters
- Logging and output settings

The models provide:
- Type validation and default values
- Field descriptions
- Checks of the modelling assumptions, with messages naming the violated
  condition (elastic coercivity, bulk growth, dilute scaling, anchoring
  exponent, nonnegative anchoring, orthogonal rotations, Lipschitz data)
"""
import logging
import math
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.homogenize import design_linear_term

logger = logging.getLogger("nematic-colloids.config")

Vector3 = Annotated[List[float], Field(min_length=3, max_length=3)]
Matrix3 = Annotated[List[Vector3], Field(min_length=3, max_length=3)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LoggingConfig(_Section):
    """Model for logging configuration.

    Console output carries warnings and errors; a log file, when set,
    receives records at the configured level.
    """

    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None


class ContainerConfig(_Section):
    """Axis-aligned container box and the base grid resolution."""

    lower: Annotated[Vector3, Field(description="Lower corner of the box")] = [0.0, 0.0, 0.0]
    upper: Annotated[Vector3, Field(description="Upper corner of the box")] = [1.0, 1.0, 1.0]
    resolution: Annotated[
        Union[int, List[int]], Field(description="Nodes per axis (one value or three)")
    ] = 16

    @model_validator(mode="after")
    def _check_box(self) -> "ContainerConfig":
        if not all(u > l for l, u in zip(self.lower, self.upper)):
            raise ValueError("container upper corner must exceed the lower corner on every axis")
        counts = [self.resolution] * 3 if isinstance(self.resolution, int) else self.resolution
        if len(counts) != 3 or min(counts) < 4:
            raise ValueError(f"grid resolution must be >= 4 per axis, got {self.resolution}")
        return self

    @property
    def shape(self) -> tuple:
        if isinstance(self.resolution, int):
            return (self.resolution,) * 3
        return tuple(self.resolution)


class ElasticConfig(_Section):
    """Elastic constants of the three-invariant density."""

    L1: Annotated[float, Field(description="Dirichlet term coefficient")] = 1.0
    L2: Annotated[float, Field(description="Divergence term coefficient")] = 0.0
    L3: Annotated[float, Field(description="Cross term coefficient")] = 0.0

    @model_validator(mode="after")
    def _coercive(self) -> "ElasticConfig":
        if not self.L1 > 0.0:
            raise ValueError("elastic coercivity condition violated: L1 must be > 0")
        if not -self.L1 < self.L3 < 2.0 * self.L1:
            raise ValueError("elastic coercivity condition violated: need -L1 < L3 < 2 L1")
        if not -0.6 * self.L1 - 0.1 * self.L3 < self.L2:
            raise ValueError("elastic coercivity condition violated: need -(3/5) L1 - (1/10) L3 < L2")
        return self


class BulkConfig(_Section):
    """Quartic bulk coefficients; κ is derived."""

    a: float = 0.5
    b: float = 0.0
    c: float = 1.0

    @field_validator("c")
    @classmethod
    def _growth(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError(f"bulk growth condition violated: c must be > 0, got {value}")
        return value


class SurfaceConfig(_Section):
    """Anchoring density of a species.

    Custom densities are referenced as "package.module:function" and must
    broadcast over leading axes of q (..., 5) and nu (..., 3).
    """

    kind: Literal["rapini_papoular", "spherical_quadratic", "custom"] = "rapini_papoular"
    strength: Annotated[float, Field(description="Rapini-Papoular strength W")] = 1.0
    coefficient: Annotated[float, Field(description="Spherical-quadratic coefficient")] = 1.0
    function: Annotated[Optional[str], Field(description="Import path of a custom density")] = None
    gradient: Annotated[Optional[str], Field(description="Import path of its Q-derivative")] = None
    bounded_below: Annotated[bool, Field(description="Custom density is >= 0")] = False
    even: Annotated[bool, Field(description="Custom density is even in nu")] = False

    @model_validator(mode="after")
    def _custom_reference(self) -> "SurfaceConfig":
        if self.kind == "custom" and not self.function:
            raise ValueError("custom surface density needs a 'function' import path")
        for path in (self.function, self.gradient):
            if path is not None and ":" not in path:
                raise ValueError(f"import path {path!r} must look like 'module:function'")
        return self

    @property
    def nonnegative(self) -> bool:
        if self.kind == "rapini_papoular":
            return self.strength >= 0.0
        if self.kind == "spherical_quadratic":
            return self.coefficient >= 0.0
        return self.bounded_below


class RotationConfig(_Section):
    """Rotation field R(x): identity, constant (rotvec or matrix) or twist."""

    kind: Literal["identity", "constant", "twist"] = "identity"
    rotvec: Optional[Vector3] = None
    matrix: Optional[Matrix3] = None
    axis: Vector3 = [0.0, 0.0, 1.0]
    rate: float = 0.0

    @model_validator(mode="after")
    def _orthogonal(self) -> "RotationConfig":
        if self.kind == "constant" and (self.rotvec is None) == (self.matrix is None):
            raise ValueError("constant rotation needs exactly one of 'rotvec' or 'matrix'")
        if self.matrix is not None:
            r = np.asarray(self.matrix, dtype=float)
            if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-10 or np.linalg.det(r) < 0.0:
                raise ValueError("orthogonal rotation condition violated: matrix is not in SO(3)")
        if self.kind == "twist" and np.linalg.norm(self.axis) == 0.0:
            raise ValueError("twist axis must be nonzero")
        return self


class DensityBox(_Section):
    lower: Vector3
    upper: Vector3
    value: float


class DensityConfig(_Section):
    """Number density: a base value, overridden on axis-aligned boxes."""

    value: float = 1.0
    boxes: List[DensityBox] = []

    @model_validator(mode="after")
    def _bounded(self) -> "DensityConfig":
        for v in [self.value] + [b.value for b in self.boxes]:
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(
                    f"bounded nonnegative density condition violated: got density {v}"
                )
        return self


class SpeciesConfig(_Section):
    """One inclusion population built from a catalogue body."""

    shape: Annotated[str, Field(description="Catalogue name, e.g. 'ball' or 'wedge+12'")]
    scale: Annotated[float, Field(gt=0.0, description="Reference scale applied to the body")] = 1.0
    translation: Vector3 = [0.0, 0.0, 0.0]
    rotation: RotationConfig = Field(default_factory=RotationConfig)
    density: DensityConfig = Field(default_factory=DensityConfig)
    surface: SurfaceConfig = Field(default_factory=SurfaceConfig)
    name: Optional[str] = None


class BoundaryConfig(_Section):
    """Dirichlet data g: a constant tensor or a uniaxial director field."""

    kind: Literal["constant", "uniaxial"] = "constant"
    q: Annotated[List[float], Field(min_length=5, max_length=5)] = [0.0] * 5
    order: Annotated[float, Field(description="Scalar order s of s(n⊗n - Id/3)")] = 0.0
    director: Literal["uniform", "twist", "radial"] = "uniform"
    direction: Vector3 = [0.0, 0.0, 1.0]
    wavenumber: float = 0.0
    centre: Vector3 = [0.5, 0.5, 0.5]
    core_radius: Annotated[float, Field(gt=0.0)] = 0.5
    lipschitz: Annotated[Optional[float], Field(description="Declared Lipschitz constant")] = None

    @model_validator(mode="after")
    def _lipschitz(self) -> "BoundaryConfig":
        values = list(self.q) + [self.order, self.wavenumber]
        if not all(math.isfinite(v) for v in values):
            raise ValueError("Lipschitz boundary data condition violated: values must be finite")
        if self.lipschitz is not None and not (math.isfinite(self.lipschitz) and self.lipschitz >= 0.0):
            raise ValueError(
                "Lipschitz boundary data condition violated: declared constant must be finite and >= 0"
            )
        return self


class DesignConfig(_Section):
    """Target (a′ - a) tr Q² + W tr(QP) for the inverse design."""

    target: Annotated[Matrix3, Field(description="Symmetric matrix P")]
    strength: Annotated[float, Field(description="Coupling W")] = 1.0
    a_prime: Annotated[float, Field(description="Target quadratic coefficient a′")] = 1.0
    order: Annotated[int, Field(ge=2)] = 32

    @field_validator("target")
    @classmethod
    def _symmetric(cls, value: List[List[float]]) -> List[List[float]]:
        m = np.asarray(value, dtype=float)
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("design target P must be symmetric")
        return value


class SolverConfig(_Section):
    method: Literal["lbfgs", "gradient_descent"] = "lbfgs"
    max_iterations: Annotated[int, Field(ge=1)] = 100_000
    gtol: Annotated[float, Field(gt=0.0)] = 1e-8
    ftol: Annotated[float, Field(gt=0.0)] = 1e-15
    memory: Annotated[int, Field(ge=1)] = 10
    init: Literal["harmonic", "constant"] = "harmonic"
    order: Annotated[int, Field(ge=2, description="Surface quadrature order")] = 16


class SweepConfig(_Section):
    """ε sweep with the dilute scaling exponent α and anchoring exponent γ."""

    eps: List[float] = [0.25, 1.0 / 6.0, 0.125]
    alpha: float = 1.2
    gamma: float = 0.0
    resolution_factor: Annotated[float, Field(gt=0.0)] = 4.0
    max_resolution: Annotated[Optional[int], Field(ge=4)] = None
    flat_norm_tests: Annotated[int, Field(ge=1)] = 16
    report_timing: bool = False
    dump_fields: bool = False

    @field_validator("eps")
    @classmethod
    def _decreasing(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("eps list must not be empty")
        if any(not 0.0 < e < 1.0 for e in value):
            raise ValueError("every eps must lie in (0, 1)")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("eps list must be strictly decreasing")
        return value

    @field_validator("alpha")
    @classmethod
    def _dilute(cls, value: float) -> float:
        if not 1.0 < value < 1.5:
            raise ValueError(f"dilute scaling condition violated: need 1 < alpha < 3/2, got {value}")
        return value

    @field_validator("gamma")
    @classmethod
    def _exponent(cls, value: float) -> float:
        if value < 0.0:
            raise ValueError(f"anchoring exponent condition violated: gamma must be >= 0, got {value}")
        if value >= 0.25:
            logger.warning("gamma = %s >= 1/4: exploratory run, no limit is asserted", value)
        return value


class OutputConfig(_Section):
    directory: Annotated[str, Field(description="Directory for reports, CSV files and dumps")] = "results"


class RunConfig(_Section):
    """Root configuration model.

    Combines all sections into one validated run description. All physical
    parameters are dimensionless.
    """

    schema_version: Literal[1]
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    container: ContainerConfig = Field(default_factory=ContainerConfig)
    elastic: ElasticConfig = Field(default_factory=ElasticConfig)
    bulk: BulkConfig = Field(default_factory=BulkConfig)
    species: List[SpeciesConfig] = []
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    design: Optional[DesignConfig] = None
    solver: SolverConfig = Field(default_factory=SolverConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    seed: int = 0
    threads: Annotated[int, Field(ge=1)] = 1

    @model_validator(mode="after")
    def _strong_anchoring(self) -> "RunConfig":
        if self.sweep.gamma > 0.0:
            for index, species in enumerate(self.species):
                if not species.surface.nonnegative:
                    raise ValueError(
                        "nonnegative surface density condition violated (gamma > 0): "
                        f"species {species.name or index} has a sign-indefinite "
                        f"{species.surface.kind} density"
                    )
            if self.design is not None:
                design = design_linear_term(
                    np.asarray(self.design.target, dtype=float),
                    self.design.strength,
                    self.bulk.a,
                    self.design.a_prime,
                    self.design.order,
                )
                for species in design.species():
                    if not species.surface.bounded_below:
                        raise ValueError(
                            "nonnegative surface density condition violated (gamma > 0): "
                            f"designed species {species.name} has a negative "
                            f"{species.surface.kind} density"
                        )
        return self
