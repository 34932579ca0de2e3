"""Split conditional gradient method, classical conditional gradient, schedules and rate envelopes."""

import math
import time
from concurrent.futures import Executor
from enum import Enum
from typing import Callable, Iterator, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from split_cg import __version__
from split_cg.errors import InfeasibleStartError, SolverError
from split_cg.models import TRACE_COLUMNS, IterationRecord, RunSummary
from split_cg.objective import PenalizedObjective, SmoothObjective, penalized_grad
from split_cg.sets import ConstraintSet, ProductConstraint
from split_cg.space import ProductPoint, Weights, block_dots

Callback = Callable[[IterationRecord, ProductPoint], None]


class ScheduleKind(str, Enum):
    CONVEX = 'convex'
    NONCONVEX = 'nonconvex'
    FROZEN = 'frozen'


class Schedule(BaseModel):
    """Step sizes gamma_t and penalty parameters lambda_t.

    convex:    gamma_t = 2/(sqrt(t)+2), lambda_{t+1} = lambda_t + lambda0/(sqrt(t)+2)^2
    nonconvex: gamma_t = 1/sqrt(t+1),   lambda_t = lambda0 * H_t for t >= 1, lambda0 at t = 0
    frozen:    gamma_t = 2/(t+2),       lambda_t = lambda0 (may be 0)
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    kind: ScheduleKind = Field(..., description='Schedule family')
    lambda0: float = Field(..., ge=0, description='Initial penalty parameter')

    @model_validator(mode='after')
    def check_lambda0(self) -> 'Schedule':
        if self.kind is not ScheduleKind.FROZEN and self.lambda0 == 0:
            raise ValueError(f'{self.kind.value} schedule needs lambda0 > 0')
        return self

    def gamma(self, t: int) -> float:
        if self.kind is ScheduleKind.CONVEX:
            return 2.0 / (math.sqrt(t) + 2.0)
        if self.kind is ScheduleKind.NONCONVEX:
            return 1.0 / math.sqrt(t + 1)
        return 2.0 / (t + 2.0)

    def gammas(self, horizon: int) -> np.ndarray:
        t = np.arange(horizon, dtype=float)
        if self.kind is ScheduleKind.CONVEX:
            return 2.0 / (np.sqrt(t) + 2.0)
        if self.kind is ScheduleKind.NONCONVEX:
            return 1.0 / np.sqrt(t + 1.0)
        return 2.0 / (t + 2.0)

    def lambdas(self, horizon: int) -> np.ndarray:
        """lambda_0, ..., lambda_{horizon-1}."""
        lam0 = self.lambda0
        if horizon <= 0:
            return np.zeros(0)
        if self.kind is ScheduleKind.CONVEX:
            t = np.arange(horizon - 1, dtype=float)
            increments = lam0 / (np.sqrt(t) + 2.0) ** 2
            return np.concatenate(([lam0], lam0 + np.cumsum(increments)))
        if self.kind is ScheduleKind.NONCONVEX:
            harmonic = np.cumsum(1.0 / np.arange(1, horizon, dtype=float))
            return lam0 * np.concatenate(([1.0], harmonic))
        return np.full(horizon, lam0)

    def lambda_upper_bound(self, t: int) -> float:
        """Growth bound on lambda_t used by the rate analysis."""
        if self.kind is ScheduleKind.CONVEX:
            s = math.sqrt(t) + 2.0
            return self.lambda0 * (2.0 * math.log(s) + 4.0 / s)
        if self.kind is ScheduleKind.NONCONVEX:
            return self.lambda0 * (math.log(t + 1) + 1.0)
        return self.lambda0


class StoppingRule(BaseModel):
    """Stop once both the Frank-Wolfe gap and the penalty are below their tolerances."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    gap_tol: float = Field(1e-6, gt=0)
    feas_tol: float = Field(1e-8, gt=0)

    def satisfied(self, fw_gap: float, penalty: float) -> bool:
        return fw_gap <= self.gap_tol and penalty <= self.feas_tol


class TerminationReason(str, Enum):
    MAX_ITERS = 'max_iters'
    CONVERGED = 'converged'


class RateConstants(BaseModel):
    """Constants entering the rate envelopes.

    R = sum_i w_i R_i^2, R_A = sum_i w_i R_i, beta_f bounds ||grad f|| on the weighted
    Minkowski sum and B = max(beta_p sqrt(R), R) with beta_p <= sqrt(R), hence B = R.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    lipschitz: float = Field(..., ge=0)
    lambda0: float = Field(..., ge=0)
    R: float = Field(..., ge=0)
    R_A: float = Field(..., ge=0)
    beta_f: float = Field(..., ge=0)
    B: float = Field(..., ge=0)

    @classmethod
    def for_problem(cls, objective: SmoothObjective, constraint: ProductConstraint, lambda0: float) -> 'RateConstants':
        R = constraint.R
        return cls(
            lipschitz=objective.lipschitz,
            lambda0=lambda0,
            R=R,
            R_A=constraint.R_A,
            beta_f=objective.gradient_bound(constraint.minkowski_radius),
            B=max(math.sqrt(R) * math.sqrt(R), R),
        )


def rate_envelope_convex(t: int, lambda0: float, lipschitz: float, R: float) -> float:
    """Bound on the primal gap H_t under the convex schedule."""
    if t < 0:
        raise ValueError('t must be nonnegative')
    s = math.sqrt(t) + 2.0
    return 2.0 * R * ((lambda0 * (2.0 * math.log(s) + 0.25) + lipschitz) / s + 4.0 * lambda0 / s**2)


def rate_envelope_nonconvex(
    t: int, lambda0: float, lipschitz: float, beta_f: float, R: float, R_A: float, B: float
) -> float:
    """Bound on the mean of the first t Frank-Wolfe gaps under the nonconvex schedule."""
    if t < 1:
        raise ValueError('the nonconvex envelope is defined for t >= 1')
    root = math.sqrt(t)
    head = (beta_f * R_A + (lipschitz + lambda0) * R + lambda0 * B) / root
    return head + math.log(t + 1) / root * lambda0 * (R + B)


def rate_envelope_frozen(t: int, lambda0: float, lipschitz: float, R: float) -> float:
    """Classical conditional gradient bound 2(L + lambda)R/(t + 2) for a fixed penalty; valid from t = 1."""
    return 2.0 * (lipschitz + lambda0) * R / (t + 2.0)


def trace_envelope(schedule: Schedule, constants: RateConstants, t: int) -> float:
    """Envelope stored in the trace row of iteration t."""
    if schedule.kind is ScheduleKind.CONVEX:
        return rate_envelope_convex(t, constants.lambda0, constants.lipschitz, constants.R)
    if schedule.kind is ScheduleKind.NONCONVEX:
        # row t carries the mean of t + 1 gaps
        c = constants
        return rate_envelope_nonconvex(t + 1, c.lambda0, c.lipschitz, c.beta_f, c.R, c.R_A, c.B)
    return rate_envelope_frozen(t, constants.lambda0, constants.lipschitz, constants.R)


class Trace:
    """Column store of iteration records; indexing returns validated IterationRecords."""

    def __init__(self, capacity: int):
        self._columns = {name: np.zeros(capacity, dtype=np.int64 if name in ('t', 'wall_nanos') else float)
                         for name in TRACE_COLUMNS}
        self._size = 0

    def append(self, record: IterationRecord):
        row = record.model_dump(by_alias=True)
        for name, column in self._columns.items():
            column[self._size] = row[name]
        self._size += 1

    def column(self, name: str) -> np.ndarray:
        return self._columns[name][: self._size]

    def __len__(self) -> int:
        return self._size

    def __getitem__(self, i: int) -> IterationRecord:
        if i < 0:
            i += self._size
        if not 0 <= i < self._size:
            raise IndexError(i)
        return IterationRecord.model_validate({name: col[i].item() for name, col in self._columns.items()})

    def __iter__(self) -> Iterator[IterationRecord]:
        for i in range(self._size):
            yield self[i]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: self.column(name) for name in TRACE_COLUMNS})


class SolveResult(BaseModel):
    """Final iterate, its weighted average and the full trace of one run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: ProductPoint
    average: np.ndarray
    trace: Trace
    termination: TerminationReason
    schedule: Schedule
    solver: Literal['scg', 'vanilla'] = 'scg'

    @property
    def iterations(self) -> int:
        return len(self.trace)

    def summary(self, name: str = 'run', config: Optional[dict] = None) -> RunSummary:
        last = self.trace[-1]
        return RunSummary(
            name=name,
            solver=self.solver,
            schedule=self.schedule.kind.value,
            lambda0=self.schedule.lambda0,
            iterations=self.iterations,
            termination=self.termination.value,
            final_f_value=last.f_value,
            final_penalty=last.penalty,
            final_F_value=last.F_value,
            final_fw_gap=last.fw_gap,
            min_fw_gap=float(self.trace.column('fw_gap').min()),
            final_average=self.average.tolist(),
            final_blocks=self.x.data.tolist(),
            version=__version__,
            config=config,
        )


def _make_record(**values) -> IterationRecord:
    try:
        return IterationRecord(**values)
    except ValidationError as e:
        raise SolverError(f'iteration {values.get("t")} produced an invalid trace row: {e}') from e


def fw_gap_subproblem(
    F: PenalizedObjective, pc: ProductConstraint, x: ProductPoint, executor: Optional[Executor] = None
) -> tuple[float, ProductPoint]:
    """Frank-Wolfe gap of F_lambda over the product set at x, and the LMO point realizing it."""
    direction = penalized_grad(F, x)
    v = pc.lmo(direction, executor)
    gap = float(pc.weights.omega @ block_dots(direction.data, x.data - v.data))
    return gap, v


def scg_solve(
    objective: SmoothObjective,
    constraint: ProductConstraint,
    schedule: Schedule,
    x0: ProductPoint,
    max_iters: int,
    stop: Optional[StoppingRule] = None,
    constants: Optional[RateConstants] = None,
    callback: Optional[Callback] = None,
    timing: bool = False,
    executor: Optional[Executor] = None,
) -> SolveResult:
    """Run the split conditional gradient method.

    Each iteration takes the gradient g of f at the weighted average of the blocks,
    calls the LMO of C_i in direction g + lambda_t (x^i - mean) for every block and
    moves every block towards its LMO point with step gamma_t. One trace row is recorded
    per iteration, describing the iterate before the step.

    Args:
        objective: Smooth objective f on R^n
        constraint: Product of the sets C_i with their weights
        schedule: Step-size and penalty schedule
        x0: Blockwise feasible start
        max_iters: Number of iterations to run unless the stopping rule fires
        stop: Optional early-stopping rule on gap and penalty
        constants: Rate constants for the trace envelope; derived from the problem when omitted
        callback: Called with every trace row and the iterate it describes
        timing: Record wall-clock nanoseconds per iteration (0 otherwise)
        executor: Optional executor for concurrent per-block LMO calls

    Returns:
        SolveResult with the final iterate, its average and the trace
    """
    if max_iters < 1:
        raise ValueError('max_iters must be at least 1')
    if x0.m != constraint.m or x0.n != constraint.dimension:
        expected = (constraint.m, constraint.dimension)
        raise InfeasibleStartError(f'start of shape {(x0.m, x0.n)} does not match {expected}')
    if not constraint.contains(x0):
        raise InfeasibleStartError('start point is not blockwise feasible')
    if constants is None:
        constants = RateConstants.for_problem(objective, constraint, schedule.lambda0)

    w = constraint.weights.omega
    lambdas = schedule.lambdas(max_iters)
    gammas = schedule.gammas(max_iters)
    trace = Trace(max_iters)
    x = np.array(x0.data, dtype=float)
    gap_sum = 0.0
    termination = TerminationReason.MAX_ITERS

    for t in range(max_iters):
        started = time.perf_counter_ns() if timing else 0
        lam = float(lambdas[t])
        gamma = float(gammas[t])

        mean = w @ x
        grad = objective.gradient(mean)
        diff = x - mean
        direction = grad + lam * diff
        v = constraint.lmo_blocks(direction, executor)

        fw_gap = float(w @ block_dots(direction, x - v))
        f_value = objective.value(mean)
        penalty = float(w @ block_dots(diff, diff))
        gap_sum += fw_gap
        converged = stop is not None and stop.satisfied(fw_gap, penalty)

        current = x
        if not converged:
            x = x + gamma * (v - x)

        record = _make_record(
            t=t,
            lam=lam,
            gamma=gamma,
            f_value=f_value,
            penalty=penalty,
            F_value=f_value + 0.5 * lam * penalty,
            fw_gap=fw_gap,
            avg_fw_gap=gap_sum / (t + 1),
            rate_envelope=trace_envelope(schedule, constants, t),
            wall_nanos=time.perf_counter_ns() - started if timing else 0,
        )
        trace.append(record)
        if callback is not None:
            callback(record, ProductPoint.from_array(current))
        if converged:
            termination = TerminationReason.CONVERGED
            break

    final = ProductPoint.from_array(x)
    return SolveResult(
        x=final,
        average=w @ final.data,
        trace=trace,
        termination=termination,
        schedule=schedule,
        solver='scg',
    )


def vanilla_cg_solve(
    objective: SmoothObjective,
    cset: ConstraintSet,
    schedule: Schedule,
    x0: np.ndarray,
    max_iters: int,
    stop: Optional[StoppingRule] = None,
    callback: Optional[Callback] = None,
    timing: bool = False,
) -> SolveResult:
    """Classical conditional gradient: v_t = LMO(grad f(x_t)), x_{t+1} = x_t + gamma_t (v_t - x_t).

    Only the step sizes of the schedule are used; lambda_t is still recorded so that the
    trace lines up column by column with a single-set split run.
    """
    if max_iters < 1:
        raise ValueError('max_iters must be at least 1')
    x = np.array(x0, dtype=float)
    if x.shape != (cset.dimension,) or not cset.contains(x):
        raise InfeasibleStartError('start point is not feasible')
    single = ProductConstraint([cset], Weights([1.0]))
    constants = RateConstants.for_problem(objective, single, schedule.lambda0)
    lambdas = schedule.lambdas(max_iters)
    gammas = schedule.gammas(max_iters)
    trace = Trace(max_iters)
    gap_sum = 0.0
    termination = TerminationReason.MAX_ITERS

    for t in range(max_iters):
        started = time.perf_counter_ns() if timing else 0
        gamma = float(gammas[t])
        grad = objective.gradient(x)
        v = cset.lmo(grad)
        # same reduction as the product loop so single-set traces match exactly
        fw_gap = float(block_dots(grad[None, :], (x - v)[None, :])[0])
        f_value = objective.value(x)
        gap_sum += fw_gap
        converged = stop is not None and stop.satisfied(fw_gap, 0.0)

        current = x
        if not converged:
            x = x + gamma * (v - x)

        record = _make_record(
            t=t,
            lam=float(lambdas[t]),
            gamma=gamma,
            f_value=f_value,
            penalty=0.0,
            F_value=f_value,
            fw_gap=fw_gap,
            avg_fw_gap=gap_sum / (t + 1),
            rate_envelope=trace_envelope(schedule, constants, t),
            wall_nanos=time.perf_counter_ns() - started if timing else 0,
        )
        trace.append(record)
        if callback is not None:
            callback(record, ProductPoint.from_array(current[None, :]))
        if converged:
            termination = TerminationReason.CONVERGED
            break

    return SolveResult(
        x=ProductPoint.from_array(x[None, :]),
        average=x.copy(),
        trace=trace,
        termination=termination,
        schedule=schedule,
        solver='vanilla',
    )
