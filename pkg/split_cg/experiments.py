"""Built-in experiments, verification suites and the runner behind the CLI."""

from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from split_cg.config import Problem, build_problem, resolve_output_dir
from split_cg.diagnostics import (
    GridOracle,
    decomposition_identity,
    diagonal_decomposition_check,
    feasibility_equivalence,
    finite_difference_gradient,
    gap_bound_check,
    gbound_check,
    interval_analytic_minimizer,
    interval_example,
    interval_optimal_value,
    limit_of_infima,
    penalty_d,
    penalty_report,
    recurrence_check,
    regularization_path,
    sandwich_check,
)
from split_cg.errors import ConfigError
from split_cg.models import CheckResult, ObjectiveSpec, ProblemConfig, ScheduleSpec, SetSpec, SuiteReport
from split_cg.objective import (
    PenalizedObjective,
    Quadratic,
    descent_lemma_gap,
    penalized_descent_gap,
    penalized_eval,
    penalized_grad,
    random_indefinite_quadratic,
    shifted_identity,
)
from split_cg.sets import (
    Birkhoff,
    Box,
    EuclideanBall,
    L1Ball,
    NuclearBall,
    ProductConstraint,
    Simplex,
    Singleton,
    Spectrahedron,
)
from split_cg.solver import (
    RateConstants,
    Schedule,
    ScheduleKind,
    SolveResult,
    scg_solve,
    vanilla_cg_solve,
)
from split_cg.space import (
    ProductPoint,
    Weights,
    average,
    dist_diag_sq,
    lift,
    penalty_grad,
    proj_diag,
    to_weighted_gradient,
)
from split_cg.trace_store import TraceWriter

ACCEPTANCE_HORIZON = 100_000
EQUIVALENCE_HORIZON = 10_000
# long-run targets at ACCEPTANCE_HORIZON
DRIFT_TOL = 1e-2
NONCONVEX_PENALTY_TOL = 1e-2
NONCONVEX_MIN_GAP_TOL = 2e-2
SAMPLE_COUNT = 1000

# builtin configurations


def interval_config(horizon: int = ACCEPTANCE_HORIZON) -> ProblemConfig:
    """x^2/2 over {1} and [-2, 2], convex schedule, started on the diagonal at 1."""
    return ProblemConfig(
        name='interval',
        objective=ObjectiveSpec(kind='quadratic', center=[0.0]),
        sets=[SetSpec(kind='singleton', point=[1.0]), SetSpec(kind='box', lower=-2.0, upper=2.0, dimension=1)],
        weights=[0.5, 0.5],
        schedule=ScheduleSpec(kind='convex', lambda0=1.0),
        horizon=horizon,
        start=[[1.0], [1.0]],
    )


def minkowski_config(horizon: int = 10_000) -> ProblemConfig:
    """Same instance with the penalty frozen at 0: minimizes f over the Minkowski sum."""
    config = interval_config(horizon)
    return config.model_copy(update={'name': 'minkowski', 'schedule': ScheduleSpec(kind='frozen', lambda0=0.0)})


def sparse_low_rank_config(horizon: int = 2000, size: int = 20, seed: int = 2024) -> ProblemConfig:
    """Denoising a sparse plus low-rank matrix over an l1 ball and a nuclear-norm ball."""
    rng = np.random.default_rng(seed)
    low_rank = rng.standard_normal((size, 2)) @ rng.standard_normal((2, size)) / 4.0
    sparse = np.zeros((size, size))
    hits = rng.choice(size * size, size=size, replace=False)
    sparse.flat[hits] = 3.0 * rng.choice([-1.0, 1.0], size=size)
    target = low_rank + sparse + 0.1 * rng.standard_normal((size, size))
    l1_radius = 0.5 * float(np.abs(target).sum())
    nuclear_radius = 0.5 * float(np.linalg.norm(target, 'nuc'))
    return ProblemConfig(
        name='sparse-low-rank',
        objective=ObjectiveSpec(kind='quadratic', center=target.ravel().tolist()),
        sets=[
            SetSpec(kind='l1_ball', radius=l1_radius, dimension=size * size),
            SetSpec(kind='nuclear_ball', radius=nuclear_radius, rows=size, cols=size),
        ],
        schedule=ScheduleSpec(kind='convex', lambda0=1.0),
        horizon=horizon,
        start=[[0.0] * (size * size)] * 2,
    )


def nonconvex_box_config(horizon: int = ACCEPTANCE_HORIZON, dimension: int = 10, seed: int = 1) -> ProblemConfig:
    """Indefinite quadratic over [-1, 1]^n and an l1 ball of radius 2, nonconvex schedule."""
    return ProblemConfig(
        name='nonconvex-box',
        objective=ObjectiveSpec(kind='indefinite_quadratic', dimension=dimension, seed=seed),
        sets=[
            SetSpec(kind='box', lower=-1.0, upper=1.0, dimension=dimension),
            SetSpec(kind='l1_ball', radius=2.0, dimension=dimension),
        ],
        schedule=ScheduleSpec(kind='nonconvex', lambda0=1.0),
        horizon=horizon,
        start=[[0.0] * dimension] * 2,
    )


BUILTINS: dict[str, Callable[..., ProblemConfig]] = {
    'interval': interval_config,
    'minkowski': minkowski_config,
    'sparse-low-rank': sparse_low_rank_config,
    'nonconvex-box': nonconvex_box_config,
}


def builtin_config(name: str) -> ProblemConfig:
    if name not in BUILTINS:
        raise ConfigError(f'unknown builtin {name!r}; available: {", ".join(BUILTINS)}')
    return BUILTINS[name]()


def solve_problem(problem: Problem, callback=None, timing: bool = False) -> SolveResult:
    config = problem.config
    if config.solver == 'vanilla':
        return vanilla_cg_solve(
            problem.objective,
            problem.constraint.sets[0],
            problem.schedule,
            problem.x0.block(0),
            config.horizon,
            stop=problem.stop,
            callback=callback,
            timing=timing,
        )
    return scg_solve(
        problem.objective,
        problem.constraint,
        problem.schedule,
        problem.x0,
        config.horizon,
        stop=problem.stop,
        callback=callback,
        timing=timing,
    )


# verification suites


def _check(suite: str, name: str, passed: bool, value: Optional[float] = None, bound: Optional[float] = None,
           detail: str = '') -> CheckResult:
    return CheckResult(
        suite=suite,
        name=name,
        passed=bool(passed),
        value=None if value is None else float(value),
        bound=None if bound is None else float(bound),
        detail=detail,
    )


def algebra_suite(samples: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(0)
    worst_identity = worst_idempotence = worst_penalty_fd = worst_objective_fd = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 51))
        w = Weights(rng.dirichlet(np.full(m, 5.0)))
        x = ProductPoint(rng.standard_normal((m, n)))
        y = rng.standard_normal(n)
        worst_identity = max(worst_identity, float(np.max(np.abs(average(lift(y, m), w) - y))))
        once = proj_diag(x, w)
        worst_idempotence = max(worst_idempotence, float(np.max(np.abs(proj_diag(once, w).data - once.data))))

        expected = penalty_grad(x, w).data
        numeric = to_weighted_gradient(finite_difference_gradient(lambda p: 0.5 * dist_diag_sq(p, w), x, h=1e-3), w)
        scale = max(float(np.linalg.norm(expected)), 1e-12)
        worst_penalty_fd = max(worst_penalty_fd, float(np.linalg.norm(numeric.data - expected)) / scale)

        base = random_indefinite_quadratic(n, seed=int(rng.integers(1 << 31))) if n >= 2 else Quadratic(y)
        F = PenalizedObjective(base=base, lam=float(rng.uniform(0.0, 10.0)), weights=w)
        expected = penalized_grad(F, x).data
        numeric = to_weighted_gradient(finite_difference_gradient(lambda p: penalized_eval(F, p), x, h=1e-3), w)
        scale = max(float(np.linalg.norm(expected)), 1e-12)
        worst_objective_fd = max(worst_objective_fd, float(np.linalg.norm(numeric.data - expected)) / scale)

    return [
        _check('algebra', 'average_of_lift_is_identity', worst_identity <= 1e-12, worst_identity, 1e-12),
        _check('algebra', 'diagonal_projection_idempotent', worst_idempotence <= 1e-12, worst_idempotence, 1e-12),
        _check('algebra', 'penalty_gradient_matches_differences', worst_penalty_fd <= 1e-6, worst_penalty_fd, 1e-6),
        _check('algebra', 'penalized_gradient_matches_differences', worst_objective_fd <= 1e-6, worst_objective_fd,
               1e-6),
    ]


def oracles_suite(samples: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(1)
    finite_sets = [
        Box([-1.0, 0.0, 2.0], [1.0, 0.5, 3.0]),
        Simplex(4),
        L1Ball(1.5, center=[0.2, -0.1, 0.4]),
        Birkhoff(3),
        Birkhoff(4),
    ]
    results = []
    for cset in finite_sets:
        vertices = cset.vertices()
        worst = 0.0
        homogeneous = feasible = True
        for _ in range(samples):
            c = rng.standard_normal(cset.dimension)
            z = cset.lmo(c)
            worst = max(worst, float(c @ z - np.min(vertices @ c)))
            feasible &= cset.contains(z)
            homogeneous &= bool(np.array_equal(cset.lmo(3.7 * c), z))
        results.append(_check('oracles', f'{cset.kind}_{cset.dimension}_matches_vertex_enumeration',
                              worst <= 1e-12 and feasible and homogeneous, worst, 1e-12,
                              detail=f'feasible={feasible} homogeneous={homogeneous}'))

    worst_nuclear = worst_spectral = 0.0
    nuclear, spectrahedron = NuclearBall(2.0, 20, 20), Spectrahedron(20)
    spectral_feasible = True
    for _ in range(10):
        c = rng.standard_normal((20, 20))
        z = nuclear.lmo(c.ravel())
        reference = -2.0 * np.linalg.svd(c, compute_uv=False)[0]
        worst_nuclear = max(worst_nuclear, abs(float(c.ravel() @ z) - reference) / abs(reference))
        spectral_feasible &= nuclear.contains(z, 1e-8)
        z = spectrahedron.lmo(c.ravel())
        reference = float(np.linalg.eigvalsh(0.5 * (c + c.T))[0])
        worst_spectral = max(worst_spectral, abs(float(c.ravel() @ z) - reference) / abs(reference))
        spectral_feasible &= spectrahedron.contains(z, 1e-8)
    results.append(_check('oracles', 'nuclear_ball_matches_dense_svd', worst_nuclear <= 1e-6, worst_nuclear, 1e-6))
    results.append(_check('oracles', 'spectrahedron_matches_dense_eigh', worst_spectral <= 1e-6, worst_spectral, 1e-6))
    results.append(_check('oracles', 'spectral_outputs_feasible', spectral_feasible))

    projectable = [
        Singleton([0.5, -1.0, 2.0]),
        Box([-1.0, -1.0, -1.0], [1.0, 2.0, 0.5]),
        EuclideanBall(1.0, center=[0.0, 1.0, 0.0]),
        Simplex(3),
        L1Ball(1.0, dimension=3),
    ]
    worst = 0.0
    for cset in projectable:
        for k in range(10):
            x = 3.0 * rng.standard_normal(cset.dimension)
            p = cset.project(x)
            samples_v = np.array([cset.random_feasible([k, j]) for j in range(SAMPLE_COUNT)])
            worst = max(worst, float(np.max((samples_v - p) @ (x - p))))
    results.append(_check('oracles', 'projection_variational_inequality', worst <= 1e-9, worst, 1e-9))
    return results


def _geometry_instances() -> list[ProductConstraint]:
    _, interval = interval_example(1.0)
    boxes = ProductConstraint([Box([-1.0, -1.0], [1.0, 1.0]), Box([0.0, 0.0], [2.0, 2.0])], Weights([0.3, 0.7]))
    mixed = ProductConstraint(
        [Box(-1.0, 1.0, dimension=3), L1Ball(1.5, dimension=3), EuclideanBall(1.2, center=[0.3, 0.0, 0.0])]
    )
    return [interval, boxes, mixed]


def geometry_suite(samples: int = SAMPLE_COUNT) -> list[CheckResult]:
    instances = _geometry_instances()
    interval, boxes = instances[0], instances[1]
    disagreements = 0
    worst_order = worst_identity = worst_cross = worst_split = worst_d_vs_g = 0.0
    for k in range(samples):
        pc = instances[k % len(instances)]
        x = pc.random_feasible(k)
        flags = feasibility_equivalence(x, pc)
        disagreements += len(set(flags)) != 1
        d = penalty_d(x, pc)
        worst_order = max(worst_order, -d, d - dist_diag_sq(x, pc.weights))
        residual, cross = decomposition_identity(x, pc)
        worst_identity = max(worst_identity, residual)
        worst_cross = max(worst_cross, cross)
        report = penalty_report(x, pc)
        if report.orthogonal_decomposition_residual is not None:
            worst_split = max(worst_split, report.orthogonal_decomposition_residual)
            worst_d_vs_g = max(worst_d_vs_g, report.d_value - report.g_value)

    equal_boxes = ProductConstraint(boxes.sets)
    witnesses = [
        (feasibility_equivalence(lift([1.0], 2), interval), (True, True, True)),
        (feasibility_equivalence(ProductPoint([[1.0], [-2.0]]), interval), (False, False, False)),
        (feasibility_equivalence(ProductPoint([[0.2, 0.2], [0.8, 0.8]]), equal_boxes), (True, True, True)),
    ]
    witnesses_ok = all(got == want for got, want in witnesses)

    rng = np.random.default_rng(3)
    lift_mismatches = 0
    for _ in range(samples):
        pc = instances[int(rng.integers(len(instances)))]
        point = rng.uniform(-2.5, 2.5, size=pc.dimension)
        lifted, in_meet = diagonal_decomposition_check(point, pc)
        lift_mismatches += lifted != in_meet

    _, interval_pc = interval_example(1.0)
    bound_failures = sum(
        not gbound_check(interval_pc.random_feasible(2 * k), interval_pc.random_feasible(2 * k + 1), interval_pc)
        for k in range(samples)
    )
    corners = [ProductPoint([[1.0], [c]]) for c in (-2.0, 2.0)]
    bound_failures += not gbound_check(corners[0], corners[1], interval_pc)

    objective, _ = interval_example(1.0)
    chain_failures = sum(
        not gap_bound_check(interval_pc.random_feasible(k), objective, interval_pc, lam).holds
        for k in range(samples // 10)
        for lam in (0.0, 1.0, 10.0)
    )

    return [
        _check('geometry', 'three_way_equivalence', disagreements == 0, disagreements, 0),
        _check('geometry', 'equivalence_witnesses', witnesses_ok, detail='diagonal, outside and off-diagonal points'),
        _check('geometry', 'd_between_zero_and_dist', worst_order <= 1e-12, worst_order, 1e-12),
        _check('geometry', 'd_identity_residual', worst_identity <= 1e-9, worst_identity, 1e-9),
        _check('geometry', 'd_identity_sign_condition', worst_cross <= 1e-9, worst_cross, 1e-9),
        _check('geometry', 'orthogonal_decomposition_residual', worst_split <= 1e-9, worst_split, 1e-9),
        _check('geometry', 'd_below_g', worst_d_vs_g <= 1e-12, worst_d_vs_g, 1e-12),
        _check('geometry', 'lift_feasible_iff_in_intersection', lift_mismatches == 0, lift_mismatches, 0),
        _check('geometry', 'diameter_bounds', bound_failures == 0, bound_failures, 0),
        _check('geometry', 'gap_lower_bound_chain', chain_failures == 0, chain_failures, 0),
    ]


def interpolation_suite(points_per_axis: int = 10001, grid_tol: float = 1e-3) -> list[CheckResult]:
    rng = np.random.default_rng(4)
    objective, pc = interval_example(1.0)
    instances = _geometry_instances()[:2]
    worst_shift = 0.0
    monotone_failures = 0
    descent_worst = 0.0
    for k in range(100):
        inst = instances[k % 2]
        base = objective if inst.dimension == 1 else Quadratic([0.5, -0.25])
        x = inst.random_feasible(k)
        y = inst.random_feasible(k + 1000)
        F = PenalizedObjective(base=base, lam=1.0, weights=inst.weights)
        lhs, rhs = shifted_identity(F, 2.5, x)
        worst_shift = max(worst_shift, abs(lhs - rhs) / max(1.0, abs(lhs)))
        monotone_failures += penalized_eval(F, x) > penalized_eval(F.with_lambda(3.5), x)
        descent_worst = max(descent_worst, -penalized_descent_gap(F.with_lambda(float(rng.uniform(0, 10))), x, y))
        a, b = average(x, inst.weights), average(y, inst.weights)
        descent_worst = max(descent_worst, -descent_lemma_gap(base, a, b, base.lipschitz))

    oracle = GridOracle(objective, pc, points_per_axis=points_per_axis)
    sandwiches = {lam: sandwich_check(objective, pc, lam, oracle=oracle, tol=grid_tol) for lam in (0.0, 1.0, 10.0, 1e6)}
    sandwich_ok = all(s.holds for s in sandwiches.values())
    minkowski_ok = sandwiches[0.0].mid == sandwiches[0.0].rhs
    limit_ok = abs(sandwiches[1e6].mid - sandwiches[1e6].lhs) <= grid_tol

    lambdas = [0.0, 1.0, 10.0, 100.0, 1e4]
    infima = limit_of_infima(objective, pc, lambdas, oracle=oracle)
    nondecreasing = all(b >= a for a, b in zip(infima, infima[1:]))
    approaches = abs(infima[-1] - oracle.intersection_infimum()) <= grid_tol

    worst_argmin = worst_value = 0.0
    for lam in (0.0, 1.0, 10.0):
        x_star, _ = interval_analytic_minimizer(1.0, lam)
        grid_x = oracle.argmin(lam)
        worst_argmin = max(worst_argmin, float(np.max(np.abs(grid_x.data - x_star.data))))
        worst_value = max(worst_value, abs(oracle.infimum(lam) - interval_optimal_value(1.0, lam)))

    path = regularization_path(1.0, [0.0, 1.0, 10.0, 100.0])
    f_steps = np.diff(path['f_value'].to_numpy())
    d_steps = np.diff(path['dist_sq'].to_numpy())
    path_ok = bool(np.all(f_steps >= -1e-12) and np.all(d_steps <= 1e-12))

    return [
        _check('interpolation', 'shifted_penalty_identity', worst_shift <= 1e-12, worst_shift, 1e-12),
        _check('interpolation', 'monotone_in_lambda', monotone_failures == 0, monotone_failures, 0),
        _check('interpolation', 'descent_lemma', descent_worst <= 1e-9, descent_worst, 1e-9),
        _check('interpolation', 'sandwich', sandwich_ok, detail=str({k: tuple(v[:3]) for k, v in sandwiches.items()})),
        _check('interpolation', 'zero_penalty_is_minkowski_problem', minkowski_ok),
        _check('interpolation', 'large_penalty_reaches_intersection', limit_ok),
        _check('interpolation', 'infima_nondecreasing', nondecreasing, detail=str(infima)),
        _check('interpolation', 'infima_approach_intersection', approaches, infima[-1], grid_tol),
        _check('interpolation', 'closed_form_matches_grid_argmin', worst_argmin <= oracle.resolution, worst_argmin,
               oracle.resolution),
        _check('interpolation', 'closed_form_matches_grid_value', worst_value <= grid_tol, worst_value, grid_tol),
        _check('interpolation', 'regularization_path_order', path_ok),
    ]


def _gamma_sum_ok(schedule: Schedule, horizon: int) -> bool:
    partial = np.cumsum(schedule.gammas(horizon))
    t = np.arange(1, horizon + 1, dtype=float)
    return bool(np.all(partial <= 2.0 * np.sqrt(t) + 1e-12))


def _lambda_growth_ok(schedule: Schedule, horizon: int) -> bool:
    lam = schedule.lambdas(horizon)
    return all(lam[t] <= schedule.lambda_upper_bound(t) + 1e-12 for t in range(horizon))


def rates_suite(horizon: int = ACCEPTANCE_HORIZON) -> list[CheckResult]:
    results = []

    interval = build_problem(interval_config(horizon))
    run = scg_solve(interval.objective, interval.constraint, interval.schedule, interval.x0, horizon)
    constants = RateConstants.for_problem(interval.objective, interval.constraint, interval.schedule.lambda0)
    frame = run.trace.to_frame()
    replay = recurrence_check(frame, interval.objective, constants, lambda lam: interval_optimal_value(1.0, lam))
    last = run.trace[-1]
    target = last.lam / (1.0 + last.lam)
    drift = abs(float(run.average[0]) - target)
    penalty = frame['penalty'].to_numpy()
    window = max(1, horizon // 10)
    results += [
        _check('rates', 'convex_recurrence', replay.recurrence_holds, float(replay.recurrence_slack.min()), -1e-9),
        _check('rates', 'convex_envelope', replay.envelope_holds, float(replay.envelope_slack.min()), -1e-9),
        _check('rates', 'convex_iterates_feasible', interval.constraint.contains(run.x)),
        _check('rates', 'convex_average_tracks_minimizer', drift <= DRIFT_TOL, drift, DRIFT_TOL,
               detail=f'average {run.average[0]:.6f}, lambda_T {last.lam:.4f}, penalty {last.penalty:.3e}'),
        _check('rates', 'convex_penalty_tail_shrinks', penalty[-window:].mean() <= penalty[:window].mean(),
               float(penalty[-window:].mean()), float(penalty[:window].mean())),
        _check('rates', 'convex_lambda_growth', _lambda_growth_ok(interval.schedule, horizon)),
    ]

    nonconvex = build_problem(nonconvex_box_config(horizon))
    run = scg_solve(nonconvex.objective, nonconvex.constraint, nonconvex.schedule, nonconvex.x0, horizon)
    avg = run.trace.column('avg_fw_gap')
    envelope = run.trace.column('rate_envelope')
    gaps = run.trace.column('fw_gap')
    final_penalty = run.trace[-1].penalty
    results += [
        _check('rates', 'nonconvex_envelope', bool(np.all(avg <= envelope)), float(np.max(avg - envelope)), 0.0,
               detail=f'min gap {gaps.min():.3e}, final penalty {final_penalty:.3e}'),
        _check('rates', 'nonconvex_final_penalty', final_penalty <= NONCONVEX_PENALTY_TOL, final_penalty,
               NONCONVEX_PENALTY_TOL),
        _check('rates', 'nonconvex_min_gap', float(gaps.min()) <= NONCONVEX_MIN_GAP_TOL, float(gaps.min()),
               NONCONVEX_MIN_GAP_TOL),
        _check('rates', 'nonconvex_gaps_nonnegative', bool(np.all(gaps >= -1e-9)), float(gaps.min()), -1e-9),
        _check('rates', 'nonconvex_iterates_feasible', nonconvex.constraint.contains(run.x)),
        _check('rates', 'nonconvex_lambda_growth', _lambda_growth_ok(nonconvex.schedule, horizon)),
        _check('rates', 'nonconvex_step_sum', _gamma_sum_ok(nonconvex.schedule, horizon)),
    ]

    steps = min(horizon, EQUIVALENCE_HORIZON)
    box = Box(-1.0, 1.0, dimension=5)
    objective = Quadratic([2.0, 0.3, -0.5, 0.1, -3.0])
    schedule = Schedule(kind=ScheduleKind.CONVEX, lambda0=1.0)
    start = box.random_feasible(5)
    split = scg_solve(objective, ProductConstraint([box]), schedule, ProductPoint([start]), steps)
    plain = vanilla_cg_solve(objective, box, schedule, start, steps)
    worst = float(np.max(np.abs(split.trace.to_frame().to_numpy() - plain.trace.to_frame().to_numpy())))
    worst = max(worst, float(np.max(np.abs(split.x.data - plain.x.data))))
    results.append(_check('rates', 'single_set_matches_classical', worst <= 1e-12, worst, 1e-12))
    return results


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    'algebra': algebra_suite,
    'oracles': oracles_suite,
    'geometry': geometry_suite,
    'interpolation': interpolation_suite,
    'rates': rates_suite,
}
SUITE_NAMES = tuple(SUITES) + ('all',)


def run_suite(suite: str, horizon: Optional[int] = None) -> SuiteReport:
    if suite not in SUITE_NAMES:
        raise ConfigError(f'unknown suite {suite!r}; available: {", ".join(SUITE_NAMES)}')
    names = list(SUITES) if suite == 'all' else [suite]
    checks = []
    for name in names:
        if name == 'rates' and horizon is not None:
            checks += rates_suite(horizon)
        else:
            checks += SUITES[name]()
    return SuiteReport(suite=suite, generated_at=datetime.now(), checks=checks)


class ExperimentRunner:
    """Runs configured problems and verification suites, printing progress."""

    def __init__(self, output_dir: Optional[str] = None, progress_every: int = 10_000, timing: bool = False):
        self.output_dir = output_dir
        self.progress_every = progress_every
        self.timing = timing

    def run(self, config: ProblemConfig) -> tuple[SolveResult, Path]:
        """
        Solve one configured problem and persist its trace and summary.

        Args:
            config: Validated problem configuration

        Returns:
            tuple: (SolveResult, path of the trace CSV)
        """
        problem = build_problem(config)
        output_dir = resolve_output_dir(config, self.output_dir)
        timing = self.timing or config.timing
        pc = problem.constraint

        print(f'🔧 Problem: {config.name} ({config.solver}, {problem.schedule.kind.value} schedule, '
              f'lambda0={problem.schedule.lambda0})')
        print(f'   Sets: {", ".join(s.kind for s in pc.sets)}  (n={pc.dimension}, m={pc.m})')
        print(f'🚀 Running {config.horizon} iterations')

        with TraceWriter(output_dir, config.name) as writer:

            def on_iteration(record, x):
                writer.append(record)
                if self.progress_every and (record.t + 1) % self.progress_every == 0:
                    print(f'   t={record.t + 1:>8}  F={record.F_value:.6e}  gap={record.fw_gap:.3e}  '
                          f'penalty={record.penalty:.3e}')

            result = solve_problem(problem, callback=on_iteration, timing=timing)

        summary = result.summary(config.name, config.model_dump(mode='json'))
        writer.write_summary(summary)

        print(f'\n{"=" * 50}')
        print('📊 Run Summary:')
        print(f'   Iterations: {summary.iterations} ({summary.termination})')
        print(f'   f(Ax): {summary.final_f_value:.8e}')
        print(f'   Penalty: {summary.final_penalty:.3e}')
        print(f'   F-W gap: {summary.final_fw_gap:.3e} (min {summary.min_fw_gap:.3e})')
        if len(summary.final_average) <= 5:
            print(f'   Average: {[round(v, 6) for v in summary.final_average]}')
        print(f'📄 Trace written to: {writer.trace_path}')
        print(f'📄 Summary written to: {writer.summary_path}')
        return result, writer.trace_path

    def verify(self, suite: str, horizon: Optional[int] = None) -> tuple[SuiteReport, Path]:
        print(f'🔍 Running verification suite: {suite}')
        report = run_suite(suite, horizon)
        for check in report.checks:
            mark = '✅' if check.passed else '❌'
            value = '' if check.value is None else f'  value={check.value:.3e}'
            bound = '' if check.bound is None else f'  bound={check.bound:.3e}'
            print(f'{mark} [{check.suite}] {check.name}{value}{bound}')

        output_dir = resolve_output_dir(None, self.output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        path = output_dir / f'verify_{suite}.json'
        with open(path, 'w') as f:
            f.write(report.model_dump_json(indent=2))
            f.write('\n')

        print(f'\n{"=" * 50}')
        print(f'📊 {len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed')
        print(f'📄 Report written to: {path}')
        return report, path
