"""Loading problem configurations and turning them into solver inputs."""

import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from split_cg.errors import ConfigError, SplitCGError
from split_cg.models import ObjectiveSpec, ProblemConfig, SetSpec
from split_cg.objective import (
    IndefiniteQuadratic,
    LeastSquares,
    LinearObjective,
    Quadratic,
    SmoothObjective,
    random_indefinite_quadratic,
)
from split_cg.sets import (
    Birkhoff,
    Box,
    ConstraintSet,
    EuclideanBall,
    L1Ball,
    NuclearBall,
    ProductConstraint,
    Simplex,
    Singleton,
    Spectrahedron,
)
from split_cg.solver import Schedule, StoppingRule
from split_cg.space import ProductPoint, Weights

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUTPUT_DIR_ENV = 'SPLIT_CG_OUTPUT_DIR'
DEFAULT_OUTPUT_DIR = 'runs'

MATRIX_FIELDS = ('matrix',)
VECTOR_FIELDS = ('center', 'rhs', 'linear', 'coefficients')


class Problem(BaseModel):
    """Everything a solver call needs, built from a ProblemConfig."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ProblemConfig
    objective: SmoothObjective
    constraint: ProductConstraint
    schedule: Schedule
    x0: ProductPoint
    stop: Optional[StoppingRule]


def load_config(path: Union[str, Path]) -> ProblemConfig:
    """Read a TOML config (or the `config` echo inside a run summary JSON) and validate it.

    CSV paths inside the objective are resolved against the config file's directory.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError('config file not found', path)
    try:
        if path.suffix == '.json':
            with open(path) as f:
                raw = json.load(f)
            raw = raw.get('config', raw) if isinstance(raw, dict) else raw
        else:
            with open(path, 'rb') as f:
                raw = tomllib.load(f)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f'cannot parse config: {e}', path) from e
    if not isinstance(raw, dict):
        raise ConfigError('config must be a table', path)
    _resolve_paths(raw, path.parent)
    return validate_config(raw, path)


def validate_config(raw: dict[str, Any], path: Optional[Path] = None) -> ProblemConfig:
    try:
        return ProblemConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e), path) from e


def apply_overrides(config: ProblemConfig, **overrides: Any) -> ProblemConfig:
    """Return a revalidated copy with CLI overrides applied; None values are ignored."""
    data = config.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        if key == 'lambda0':
            data['schedule']['lambda0'] = value
        elif key == 'schedule':
            data['schedule']['kind'] = value
        elif key == 'max_iters':
            data['horizon'] = value
        else:
            data[key] = value
    return validate_config(data)


def resolve_output_dir(config: Optional[ProblemConfig], override: Optional[str] = None) -> Path:
    """CLI flag, then SPLIT_CG_OUTPUT_DIR, then the config value (or 'runs' without a config)."""
    fallback = config.output_dir if config is not None else DEFAULT_OUTPUT_DIR
    return Path(override or os.getenv(OUTPUT_DIR_ENV) or fallback)


def _resolve_paths(raw: dict[str, Any], base_dir: Path):
    objective = raw.get('objective')
    if not isinstance(objective, dict):
        return
    for name in MATRIX_FIELDS + VECTOR_FIELDS:
        value = objective.get(name)
        if isinstance(value, str):
            objective[name] = str((base_dir / value).resolve())


def _format_validation_error(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        location = '.'.join(str(p) for p in err['loc'])
        parts.append(f'{location}: {err["msg"]}' if location else err['msg'])
    return '; '.join(parts)


def load_matrix(source: Union[str, list[list[float]]]) -> np.ndarray:
    if isinstance(source, str):
        try:
            return pd.read_csv(source, header=None).to_numpy(dtype=float)
        except (OSError, ValueError) as e:
            raise ConfigError(f'cannot read matrix: {e}', source) from e
    return np.array(source, dtype=float)


def load_vector(source: Union[str, list[float]]) -> np.ndarray:
    if isinstance(source, str):
        return load_matrix(source).ravel()
    return np.array(source, dtype=float)


def build_objective(spec: ObjectiveSpec) -> SmoothObjective:
    if spec.kind == 'quadratic':
        return Quadratic(load_vector(spec.center))
    if spec.kind == 'least_squares':
        return LeastSquares(load_matrix(spec.matrix), load_vector(spec.rhs))
    if spec.kind == 'linear':
        return LinearObjective(load_vector(spec.coefficients))
    if spec.matrix is None:
        return random_indefinite_quadratic(spec.dimension, seed=spec.seed or 0)
    return IndefiniteQuadratic(load_matrix(spec.matrix), load_vector(spec.linear))


def build_set(spec: SetSpec) -> ConstraintSet:
    if spec.kind == 'singleton':
        return Singleton(spec.point)
    if spec.kind == 'box':
        return Box(spec.lower, spec.upper, dimension=spec.dimension)
    if spec.kind == 'l1_ball':
        return L1Ball(spec.radius, dimension=spec.dimension, center=spec.center)
    if spec.kind == 'simplex':
        return Simplex(spec.dimension)
    if spec.kind == 'euclidean_ball':
        return EuclideanBall(spec.radius, dimension=spec.dimension, center=spec.center)
    if spec.kind == 'nuclear_ball':
        return NuclearBall(spec.radius, spec.rows, spec.cols)
    if spec.kind == 'spectrahedron':
        return Spectrahedron(spec.size)
    return Birkhoff(spec.size)


def build_problem(config: ProblemConfig) -> Problem:
    """Instantiate objective, sets, schedule and start; any inconsistency becomes a ConfigError."""
    try:
        objective = build_objective(config.objective)
        sets = [build_set(s) for s in config.sets]
        weights = Weights(config.weights) if config.weights is not None else Weights.uniform(len(sets))
        constraint = ProductConstraint(sets, weights)
        if objective.dimension != constraint.dimension:
            raise ConfigError(
                f'objective dimension {objective.dimension} does not match set dimension {constraint.dimension}'
            )
        schedule = Schedule(kind=config.schedule.kind, lambda0=config.schedule.lambda0)
        if config.start is not None:
            x0 = ProductPoint(config.start)
        else:
            x0 = constraint.random_feasible(config.seed)
    except ConfigError:
        raise
    except (SplitCGError, ValueError) as e:
        raise ConfigError(str(e)) from e
    if x0.m != constraint.m or x0.n != constraint.dimension or not constraint.contains(x0):
        raise ConfigError('start point is not blockwise feasible')
    stop = None
    if config.stopping.enabled:
        stop = StoppingRule(gap_tol=config.stopping.gap_tol, feas_tol=config.stopping.feas_tol)
    return Problem(config=config, objective=objective, constraint=constraint, schedule=schedule, x0=x0, stop=stop)
