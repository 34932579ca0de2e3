"""Trace processing for convergence reports."""

from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from split_cg.models import RunSummary
from split_cg.trace_store import read_summary, read_trace, summary_path_for

TAIL_FRACTION = 0.1
ENVELOPE_SLACK = 1e-9


class TraceProcessor:
    """Re-read a persisted trace (and its summary, when present) and derive statistics."""

    def __init__(self, trace_path: str, validate: bool = True):
        """Initialize with the trace CSV path."""
        self.trace_path = Path(trace_path)
        self.validate = validate
        companion = summary_path_for(self.trace_path)
        self.summary: Optional[RunSummary] = read_summary(companion) if companion else None

    def load(self) -> pd.DataFrame:
        return read_trace(self.trace_path, validate=self.validate)

    @property
    def schedule(self) -> Optional[str]:
        return self.summary.schedule if self.summary else None

    def penalty_tail(self, df: pd.DataFrame) -> dict[str, Any]:
        """Compare the penalty over the first and last tenth of the run."""
        penalty = df['penalty'].to_numpy(dtype=float)
        window = max(1, int(len(penalty) * TAIL_FRACTION))
        head, tail = penalty[:window], penalty[-window:]
        steps = np.diff(tail)
        return {
            'window': window,
            'start_mean': float(head.mean()),
            'end_mean': float(tail.mean()),
            'shrinking': bool(tail.mean() <= head.mean()),
            'nonincreasing_fraction': float(np.mean(steps <= 0.0)) if len(steps) else 1.0,
        }

    def envelope_violations(self, df: pd.DataFrame) -> Optional[int]:
        """Rows where the running average gap exceeds the envelope.

        Only the nonconvex schedule bounds a trace quantity directly; other schedules bound
        the primal gap, which needs the optimal value, so None is returned.
        """
        if self.schedule != 'nonconvex':
            return None
        excess = df['avg_fw_gap'].to_numpy(dtype=float) - df['rate_envelope'].to_numpy(dtype=float)
        return int(np.sum(excess > ENVELOPE_SLACK))

    def get_summary_stats(self, df: pd.DataFrame) -> dict[str, Any]:
        """Get summary statistics for the trace."""
        if df.empty:
            return {}

        last = df.iloc[-1]
        best = int(df['fw_gap'].to_numpy(dtype=float).argmin())
        stats = {
            'iterations': len(df),
            'schedule': self.schedule,
            'final': {
                'lambda': float(last['lambda']),
                'F_value': float(last['F_value']),
                'f_value': float(last['f_value']),
                'penalty': float(last['penalty']),
                'fw_gap': float(last['fw_gap']),
                'rate_envelope': float(last['rate_envelope']),
            },
            'best_gap': {'t': int(df['t'].iloc[best]), 'value': float(df['fw_gap'].iloc[best])},
            'penalty_tail': self.penalty_tail(df),
            'envelope_violations': self.envelope_violations(df),
        }

        if self.summary:
            stats['termination'] = self.summary.termination
            stats['name'] = self.summary.name

        if df['wall_nanos'].any():
            stats['wall_seconds'] = float(df['wall_nanos'].sum()) / 1e9

        return stats

    def get_convergence_insights(self, stats: dict[str, Any]) -> list[str]:
        """Generate plain-language observations from the statistics."""
        if not stats:
            return ['Trace is empty.']

        insights = []
        final = stats['final']
        tail = stats['penalty_tail']

        if tail['shrinking']:
            insights.append(
                f'Penalty shrank from {tail["start_mean"]:.3e} to {tail["end_mean"]:.3e} '
                f'(means over {tail["window"]} rows)'
            )
        else:
            insights.append(f'Penalty did not shrink: {tail["start_mean"]:.3e} -> {tail["end_mean"]:.3e}')

        if tail['nonincreasing_fraction'] < 0.5:
            insights.append('Penalty oscillates in the tail; steps still move the blocks off the diagonal')

        insights.append(f'Best Frank-Wolfe gap {stats["best_gap"]["value"]:.3e} at t={stats["best_gap"]["t"]}')

        violations = stats['envelope_violations']
        if violations is None:
            insights.append('Envelope bounds the primal gap for this schedule; not checkable from the trace alone')
        elif violations == 0:
            insights.append('Average gap stayed below the rate envelope on every row')
        else:
            insights.append(f'Average gap exceeded the rate envelope on {violations} rows')

        if final['fw_gap'] <= 1e-6:
            insights.append('Final gap is below 1e-6')

        return insights
