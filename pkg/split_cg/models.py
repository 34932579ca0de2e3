"""Pydantic models for problem configuration, trace rows and reports."""

from datetime import datetime
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from split_cg.space import Weights

ObjectiveKind = Literal['quadratic', 'least_squares', 'indefinite_quadratic', 'linear']
SetKind = Literal[
    'singleton', 'box', 'l1_ball', 'simplex', 'euclidean_ball', 'nuclear_ball', 'spectrahedron', 'birkhoff'
]
ScheduleName = Literal['convex', 'nonconvex', 'frozen']

# A matrix or vector is either given inline or as a CSV path relative to the config file
MatrixSource = Union[str, list[list[float]]]
VectorSource = Union[str, list[float]]


class ObjectiveSpec(BaseModel):
    """Smooth objective description."""

    model_config = ConfigDict(extra='forbid')

    kind: ObjectiveKind = Field(..., description='Objective family')
    center: Optional[VectorSource] = Field(None, description='Center b of 1/2 ||x - b||^2')
    matrix: Optional[MatrixSource] = Field(None, description='M for least squares, Q for indefinite quadratics')
    rhs: Optional[VectorSource] = Field(None, description='Right-hand side b for least squares')
    linear: Optional[VectorSource] = Field(None, description='Linear term q of an indefinite quadratic')
    coefficients: Optional[VectorSource] = Field(None, description='Coefficients of a linear objective')
    dimension: Optional[int] = Field(None, ge=2, description='Dimension of a seeded random indefinite quadratic')
    seed: Optional[int] = Field(None, ge=0, description='Seed of a random indefinite quadratic')

    @model_validator(mode='after')
    def check_parameters(self) -> 'ObjectiveSpec':
        required = {
            'quadratic': ('center',),
            'least_squares': ('matrix', 'rhs'),
            'linear': ('coefficients',),
        }.get(self.kind, ())
        if self.kind == 'indefinite_quadratic' and self.matrix is None and self.dimension is None:
            raise ValueError('indefinite_quadratic needs either matrix and linear, or dimension')
        if self.kind == 'indefinite_quadratic' and self.matrix is not None and self.linear is None:
            raise ValueError('indefinite_quadratic with a matrix also needs linear')
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f'{self.kind} objective is missing {", ".join(missing)}')
        return self


class SetSpec(BaseModel):
    """Constraint set description: a kind tag plus its parameters."""

    model_config = ConfigDict(extra='forbid')

    kind: SetKind = Field(..., description='Set family')
    point: Optional[list[float]] = Field(None, description='Point of a singleton')
    lower: Optional[Union[float, list[float]]] = Field(None, description='Box lower bounds')
    upper: Optional[Union[float, list[float]]] = Field(None, description='Box upper bounds')
    radius: Optional[float] = Field(None, ge=0, description='Radius of a ball')
    center: Optional[list[float]] = Field(None, description='Center of a ball')
    dimension: Optional[int] = Field(None, ge=1, description='Dimension when not implied by other fields')
    rows: Optional[int] = Field(None, ge=1, description='Rows of a nuclear-norm ball')
    cols: Optional[int] = Field(None, ge=1, description='Columns of a nuclear-norm ball')
    size: Optional[int] = Field(None, ge=1, description='Order of a spectrahedron or Birkhoff polytope')

    @model_validator(mode='after')
    def check_parameters(self) -> 'SetSpec':
        required = {
            'singleton': ('point',),
            'box': ('lower', 'upper'),
            'l1_ball': ('radius',),
            'simplex': ('dimension',),
            'euclidean_ball': ('radius',),
            'nuclear_ball': ('radius', 'rows', 'cols'),
            'spectrahedron': ('size',),
            'birkhoff': ('size',),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f'{self.kind} set is missing {", ".join(missing)}')
        if self.kind in ('l1_ball', 'euclidean_ball') and self.center is None and self.dimension is None:
            raise ValueError(f'{self.kind} needs a center or a dimension')
        return self


class ScheduleSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: ScheduleName = Field('convex', description='Step-size and penalty schedule')
    lambda0: float = Field(1.0, ge=0, description='Initial penalty parameter')

    @model_validator(mode='after')
    def check_lambda0(self) -> 'ScheduleSpec':
        if self.kind != 'frozen' and self.lambda0 <= 0:
            raise ValueError(f'{self.kind} schedule needs lambda0 > 0')
        return self


class StoppingSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    enabled: bool = Field(False, description='Stop early once both tolerances are met')
    gap_tol: float = Field(1e-6, gt=0, description='Frank-Wolfe gap tolerance')
    feas_tol: float = Field(1e-8, gt=0, description='Squared diagonal distance tolerance')


class ProblemConfig(BaseModel):
    """Complete description of one solver run."""

    model_config = ConfigDict(extra='forbid')

    name: str = Field('run', description='Run name; used for output file names')
    solver: Literal['scg', 'vanilla'] = Field('scg', description='Split or classical conditional gradient')
    objective: ObjectiveSpec
    sets: list[SetSpec] = Field(..., min_length=1, description='Constraint sets C_1, ..., C_m')
    weights: Optional[list[float]] = Field(None, description='Block weights; uniform when omitted')
    schedule: ScheduleSpec = Field(default_factory=ScheduleSpec)
    horizon: int = Field(1000, ge=1, description='Maximum number of iterations')
    seed: int = Field(0, ge=0, description='Seed for the random feasible start')
    start: Optional[list[list[float]]] = Field(None, description='Explicit starting blocks')
    output_dir: str = Field('runs', description='Directory for trace and summary files')
    timing: bool = Field(False, description='Record wall-clock nanoseconds per iteration')
    stopping: StoppingSpec = Field(default_factory=StoppingSpec)

    @model_validator(mode='after')
    def check_shapes(self) -> 'ProblemConfig':
        m = len(self.sets)
        if self.weights is not None:
            if len(self.weights) != m:
                raise ValueError(f'{len(self.weights)} weights given for {m} sets')
            Weights(self.weights)
        if self.start is not None and len(self.start) != m:
            raise ValueError(f'start has {len(self.start)} blocks for {m} sets')
        if self.solver == 'vanilla' and m != 1:
            raise ValueError('the vanilla solver takes exactly one set')
        return self


class IterationRecord(BaseModel):
    """One trace row."""

    model_config = ConfigDict(populate_by_name=True, allow_inf_nan=False)

    t: int = Field(..., ge=0)
    lam: float = Field(..., ge=0, alias='lambda')
    gamma: float = Field(..., gt=0, le=1)
    f_value: float
    penalty: float = Field(..., ge=0)
    F_value: float
    fw_gap: float = Field(..., ge=-1e-9, description='Frank-Wolfe gap of the penalized subproblem')
    avg_fw_gap: float
    rate_envelope: float = Field(..., ge=0)
    wall_nanos: int = Field(0, ge=0)


TRACE_COLUMNS = [
    'lambda' if name == 'lam' else name for name in IterationRecord.model_fields
]


class RunSummary(BaseModel):
    """Companion JSON of a trace file."""

    name: str
    solver: str
    schedule: str
    lambda0: float
    iterations: int
    termination: str
    final_f_value: float
    final_penalty: float
    final_F_value: float
    final_fw_gap: float
    min_fw_gap: float
    final_average: list[float]
    final_blocks: list[list[float]]
    version: str
    config: Optional[dict] = Field(None, description='Validated configuration that reproduces this run')


class PenaltyReport(BaseModel):
    dist_sq: float = Field(..., description='Squared distance to the diagonal')
    d_value: Optional[float] = Field(None, description='Weighted squared distance of A x to each set')
    g_value: Optional[float] = Field(None, description='Squared distance of A x to the intersection')
    orthogonal_decomposition_residual: Optional[float] = Field(None, description='Residual of the splitting identity')


class CheckResult(BaseModel):
    suite: str
    name: str
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None
    detail: str = ''


class SuiteReport(BaseModel):
    suite: str
    generated_at: datetime
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]
