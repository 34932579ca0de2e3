import json
from pathlib import Path

import pandas as pd
import pytest

from split_cg.config import build_problem
from split_cg.errors import ConfigError
from split_cg.experiments import (
    BUILTINS,
    ExperimentRunner,
    builtin_config,
    interval_config,
    minkowski_config,
    rates_suite,
    run_suite,
)
from split_cg.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from split_cg.trace_store import read_summary, read_trace

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'

# hold at any horizon; the remaining rate checks describe the long run
HORIZON_FREE_CHECKS = {
    'convex_recurrence',
    'convex_envelope',
    'convex_iterates_feasible',
    'convex_lambda_growth',
    'nonconvex_envelope',
    'nonconvex_gaps_nonnegative',
    'nonconvex_iterates_feasible',
    'nonconvex_lambda_growth',
    'nonconvex_step_sum',
    'single_set_matches_classical',
}


class TestBuiltins:
    @pytest.mark.parametrize('name', list(BUILTINS))
    def test_configs_build(self, name):
        problem = build_problem(builtin_config(name))
        assert problem.constraint.contains(problem.x0)

    def test_unknown(self):
        with pytest.raises(ConfigError, match='available'):
            builtin_config('nope')

    def test_minkowski_freezes_penalty(self):
        config = minkowski_config()
        assert config.schedule.kind == 'frozen'
        assert config.schedule.lambda0 == 0.0
        assert config.sets == interval_config().sets


class TestSuites:
    @pytest.mark.parametrize('suite', ['algebra', 'oracles', 'geometry', 'interpolation'])
    def test_suite_passes(self, suite):
        report = run_suite(suite)
        assert report.checks
        assert report.passed, [c.name for c in report.failures]

    def test_rates_short_horizon(self):
        checks = {c.name: c for c in rates_suite(10_000)}
        assert HORIZON_FREE_CHECKS <= set(checks)
        failed = [name for name in HORIZON_FREE_CHECKS if not checks[name].passed]
        assert not failed

    @pytest.mark.slow
    def test_rates_full_horizon(self):
        report = run_suite('rates')
        assert report.passed, [c.name for c in report.failures]

    def test_rates_long_run_checks_are_asserted(self):
        checks = {c.name: c for c in rates_suite(1000)}
        assert checks['convex_average_tracks_minimizer'].bound == pytest.approx(1e-2)
        assert checks['nonconvex_final_penalty'].bound == pytest.approx(1e-2)
        assert checks['nonconvex_min_gap'].bound == pytest.approx(2e-2)
        assert checks['nonconvex_final_penalty'].value is not None

    def test_nonconvex_builtin_instance(self):
        config = builtin_config('nonconvex-box')
        assert config.objective.seed == 1
        assert config.schedule.kind == 'nonconvex'

    def test_unknown_suite(self):
        with pytest.raises(ConfigError, match='unknown suite'):
            run_suite('nope')


class TestExperimentRunner:
    def test_run_writes_trace_and_summary(self, tmp_path):
        runner = ExperimentRunner(output_dir=str(tmp_path), progress_every=0)
        result, trace_path = runner.run(interval_config(500))
        assert trace_path == tmp_path / 'interval.csv'
        frame = read_trace(trace_path)
        assert len(frame) == 500 == result.iterations
        summary = read_summary(tmp_path / 'interval.json')
        assert summary.config['horizon'] == 500
        assert summary.final_blocks == result.x.data.tolist()

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv('SPLIT_CG_OUTPUT_DIR', str(tmp_path / 'env'))
        _, trace_path = ExperimentRunner(progress_every=0).run(interval_config(10))
        assert trace_path == tmp_path / 'env' / 'interval.csv'

    def test_verify_writes_report(self, tmp_path):
        report, path = ExperimentRunner(output_dir=str(tmp_path)).verify('algebra')
        assert path == tmp_path / 'verify_algebra.json'
        saved = json.loads(path.read_text())
        assert saved['suite'] == 'algebra'
        assert len(saved['checks']) == len(report.checks)


class TestCli:
    def test_run(self, tmp_path, capsys):
        code = main(['run', str(CONFIGS / 'interval.toml'), '--max-iters', '200', '--progress-every', '100',
                     '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert len(read_trace(tmp_path / 'interval.csv')) == 200
        output = capsys.readouterr().out
        assert 't=     100' in output
        assert 'Run completed' in output

    def test_timing(self, tmp_path):
        assert main(['run', str(CONFIGS / 'minkowski.toml'), '--max-iters', '50', '--timing',
                     '--out', str(tmp_path)]) == EXIT_OK
        assert read_trace(tmp_path / 'minkowski.csv')['wall_nanos'].sum() > 0

    def test_without_timing_records_zero(self, tmp_path):
        assert main(['run', str(CONFIGS / 'minkowski.toml'), '--max-iters', '50', '--out', str(tmp_path)]) == EXIT_OK
        assert (read_trace(tmp_path / 'minkowski.csv')['wall_nanos'] == 0).all()

    def test_overrides_reach_summary(self, tmp_path):
        main(['run', str(CONFIGS / 'interval.toml'), '--max-iters', '20', '--lambda0', '3', '--schedule', 'nonconvex',
              '--out', str(tmp_path)])
        summary = read_summary(tmp_path / 'interval.json')
        assert summary.schedule == 'nonconvex'
        assert summary.lambda0 == 3.0
        assert summary.iterations == 20

    def test_bad_weights(self, tmp_path, capsys):
        out = tmp_path / 'out'
        assert main(['run', str(CONFIGS / 'bad_weights.toml'), '--out', str(out)]) == EXIT_USAGE
        assert not out.exists()
        assert 'bad_weights.toml' in capsys.readouterr().out

    def test_missing_config(self, tmp_path):
        assert main(['run', str(tmp_path / 'missing.toml'), '--out', str(tmp_path)]) == EXIT_USAGE

    def test_single_set_split_matches_classical(self, tmp_path):
        for name in ('box_split', 'box_vanilla'):
            assert main(['run', str(CONFIGS / f'{name}.toml'), '--max-iters', '2000', '--out', str(tmp_path)]) == 0
        assert (tmp_path / 'box_split.csv').read_bytes() == (tmp_path / 'box_vanilla.csv').read_bytes()

    def test_rerun_from_summary_reproduces_trace(self, tmp_path):
        first, second = tmp_path / 'first', tmp_path / 'second'
        main(['run', str(CONFIGS / 'interval.toml'), '--max-iters', '300', '--out', str(first)])
        assert main(['run', str(first / 'interval.json'), '--out', str(second)]) == EXIT_OK
        assert (first / 'interval.csv').read_bytes() == (second / 'interval.csv').read_bytes()

    def test_stopping_rule_from_config(self, tmp_path):
        assert main(['run', str(CONFIGS / 'least_squares.toml'), '--out', str(tmp_path)]) == EXIT_OK
        summary = read_summary(tmp_path / 'least_squares.json')
        frame = pd.read_csv(tmp_path / 'least_squares.csv')
        assert len(frame) == summary.iterations <= 5000

    def test_builtin(self, tmp_path):
        assert main(['builtin', 'minkowski', '--max-iters', '100', '--out', str(tmp_path)]) == EXIT_OK
        assert (tmp_path / 'minkowski.csv').exists()

    @pytest.mark.parametrize('name', ['nonconvex-box', 'sparse-low-rank'])
    def test_builtin_is_deterministic(self, tmp_path, name):
        for run in ('a', 'b'):
            assert main(['builtin', name, '--max-iters', '200', '--out', str(tmp_path / run)]) == EXIT_OK
        assert (tmp_path / 'a' / f'{name}.csv').read_bytes() == (tmp_path / 'b' / f'{name}.csv').read_bytes()

    def test_builtin_list(self, capsys):
        assert main(['builtin', '--list']) == EXIT_OK
        output = capsys.readouterr().out
        for name in BUILTINS:
            assert name in output

    def test_builtin_without_name(self):
        assert main(['builtin']) == EXIT_USAGE

    def test_unknown_builtin(self, tmp_path):
        assert main(['builtin', 'nope', '--out', str(tmp_path)]) == EXIT_USAGE

    def test_verify(self, tmp_path):
        assert main(['verify', 'algebra', '--out', str(tmp_path)]) == EXIT_OK
        assert (tmp_path / 'verify_algebra.json').exists()

    def test_unknown_suite(self, tmp_path):
        assert main(['verify', 'nope', '--out', str(tmp_path)]) == EXIT_USAGE

    def test_failed_checks(self, tmp_path, monkeypatch):
        from split_cg import experiments
        from split_cg.models import CheckResult

        monkeypatch.setitem(
            experiments.SUITES, 'algebra', lambda: [CheckResult(suite='algebra', name='broken', passed=False)]
        )
        assert main(['verify', 'algebra', '--out', str(tmp_path)]) == EXIT_FAILED
