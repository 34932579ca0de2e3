"""Trace persistence: buffered CSV rows plus a JSON run summary."""

import json
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import ValidationError

from split_cg.errors import SplitCGError
from split_cg.models import TRACE_COLUMNS, IterationRecord, RunSummary

FLUSH_EVERY = 1000


class TraceWriter:
    """Writes one run's trace (`<name>.csv`) and summary (`<name>.json`) into an output directory.

    Use as a context manager; rows are appended to the CSV every FLUSH_EVERY records
    and once more on exit.
    """

    def __init__(self, output_dir: Union[str, Path], name: str, flush_every: int = FLUSH_EVERY):
        self.output_dir = Path(output_dir)
        self.name = name
        self.flush_every = flush_every
        self.trace_path = self.output_dir / f'{name}.csv'
        self.summary_path = self.output_dir / f'{name}.json'
        self._buffer: list[dict] = []
        self._rows_written = 0

    def __enter__(self) -> 'TraceWriter':
        self.output_dir.mkdir(parents=True, exist_ok=True)
        # a rerun replaces the previous trace and summary
        self.trace_path.unlink(missing_ok=True)
        self.summary_path.unlink(missing_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        self.flush()

    def append(self, record: IterationRecord):
        self._buffer.append(record.model_dump(by_alias=True))
        if len(self._buffer) >= self.flush_every:
            self.flush()

    def flush(self):
        if not self._buffer:
            return
        frame = pd.DataFrame(self._buffer, columns=TRACE_COLUMNS)
        frame.to_csv(self.trace_path, mode='a', header=self._rows_written == 0, index=False, lineterminator='\n')
        self._rows_written += len(self._buffer)
        self._buffer = []

    @property
    def rows_written(self) -> int:
        return self._rows_written + len(self._buffer)

    def write_summary(self, summary: RunSummary) -> Path:
        with open(self.summary_path, 'w') as f:
            f.write(summary.model_dump_json(indent=2))
            f.write('\n')
        return self.summary_path


def read_trace(path: Union[str, Path], validate: bool = True) -> pd.DataFrame:
    """Load a trace CSV; every row is checked against IterationRecord unless validate is False."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f'Trace not found: {path}')
    frame = pd.read_csv(path)
    if list(frame.columns) != TRACE_COLUMNS:
        raise SplitCGError(f'{path}: unexpected columns {list(frame.columns)}')
    if validate:
        for i, row in enumerate(frame.to_dict('records')):
            try:
                IterationRecord.model_validate(row)
            except ValidationError as e:
                raise SplitCGError(f'{path}: row {i} is invalid: {e}') from e
    return frame


def read_summary(path: Union[str, Path]) -> RunSummary:
    with open(path) as f:
        return RunSummary.model_validate(json.load(f))


def summary_path_for(trace_path: Union[str, Path]) -> Optional[Path]:
    """Companion summary of a trace file, if it exists."""
    candidate = Path(trace_path).with_suffix('.json')
    return candidate if candidate.exists() else None
