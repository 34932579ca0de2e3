"""Checks that the installation and the shipped configs are usable."""

import importlib
from pathlib import Path

import pytest

from split_cg import __version__
from split_cg.config import build_problem, load_config

ROOT = Path(__file__).resolve().parent.parent


@pytest.mark.parametrize('module', ['numpy', 'scipy.optimize', 'pandas', 'pydantic', 'dotenv'])
def test_dependencies(module):
    importlib.import_module(module)


@pytest.mark.parametrize(
    'module',
    [
        'split_cg.space',
        'split_cg.sets',
        'split_cg.objective',
        'split_cg.solver',
        'split_cg.diagnostics',
        'split_cg.trace_store',
        'split_cg.experiments',
        'split_cg.main',
        'split_cg_reports.cli',
    ],
)
def test_imports(module):
    importlib.import_module(module)


def test_version():
    assert __version__ == '1.0.0'


def test_environment_example():
    text = (ROOT / '.env.example').read_text()
    assert 'SPLIT_CG_OUTPUT_DIR=' in text


@pytest.mark.parametrize(
    'name', ['interval.toml', 'minkowski.toml', 'box_split.toml', 'box_vanilla.toml', 'least_squares.toml']
)
def test_shipped_configs_build(name):
    problem = build_problem(load_config(ROOT / 'configs' / name))
    assert problem.constraint.contains(problem.x0)


@pytest.mark.parametrize(
    'path',
    [
        'split_cg.space:inner',
        'split_cg.space:norm',
        'split_cg.space:average',
        'split_cg.space:lift',
        'split_cg.space:proj_diag',
        'split_cg.space:dist_diag_sq',
        'split_cg.space:penalty_grad',
        'split_cg.sets:lmo_product',
        'split_cg.sets:intersect_catalog',
        'split_cg.sets:ConstraintSet.lmo',
        'split_cg.sets:ConstraintSet.contains',
        'split_cg.sets:ConstraintSet.project',
        'split_cg.sets:ProductConstraint.lmo',
        'split_cg.sets:ProductConstraint.contains',
        'split_cg.sets:ProductConstraint.random_feasible',
        'split_cg.objective:penalized_grad',
        'split_cg.solver:scg_solve',
        'split_cg.solver:vanilla_cg_solve',
        'split_cg.solver:fw_gap_subproblem',
    ],
)
def test_public_operations_are_documented(path):
    module_name, _, qualname = path.partition(':')
    obj = importlib.import_module(module_name)
    for part in qualname.split('.'):
        obj = getattr(obj, part)
    assert (obj.__doc__ or '').strip()
