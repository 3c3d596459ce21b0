"""
Trace CSV persistence.

One row per agent per iteration, header exactly
`iter,agent_id,x,y[,z],uv,fitness,lmate_id`. Floats are written with 17
significant digits so a read after a write gives back identical values.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from bmo.engine import SwarmState

from .exceptions import OutputPathError, TraceFormatError

logger = logging.getLogger("bflyflow")

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    agent_id: int
    position: tuple[float, ...]
    uv: float
    fitness: float
    lmate_id: int

    @property
    def dim(self) -> int:
        return len(self.position)


def trace_header(dim: int) -> list[str]:
    if dim not in (2, 3):
        raise TraceFormatError(f"traces hold 2-D or 3-D positions, got {dim}-D", row=1)
    return ["iter", "agent_id", *AXES[:dim], "uv", "fitness", "lmate_id"]


def records_for(state: SwarmState) -> list[TraceRecord]:
    """Trace rows for a sensed state: positions before the move, with that iteration's UV, fitness and l-mate."""
    return [
        TraceRecord(
            iter=state.time_index,
            agent_id=agent.id,
            position=tuple(float(c) for c in agent.position),
            uv=float(agent.uv),
            fitness=float(agent.fitness),
            lmate_id=int(agent.lmate),
        )
        for agent in state.agents
    ]


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_trace(path, records: Iterable[TraceRecord], dim: Optional[int] = None) -> Path:
    """
    Write records to path. An empty record list gives a header-only file
    (2-D unless dim says otherwise). Record dimensions are checked before
    the file is opened, so a rejected trace leaves nothing behind.

    Raises:
        TraceFormatError: a record's dimension differs from the trace's
        OutputPathError: path cannot be written
    """
    records = list(records)
    if dim is None:
        dim = records[0].dim if records else 2
    for row_number, record in enumerate(records, start=2):
        if record.dim != dim:
            raise TraceFormatError(
                f"record for agent {record.agent_id} is {record.dim}-D in a {dim}-D trace",
                row=row_number,
            )
    header = trace_header(dim)
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for record in records:
                writer.writerow([
                    record.iter,
                    record.agent_id,
                    *(_fmt(c) for c in record.position),
                    _fmt(record.uv),
                    _fmt(record.fitness),
                    record.lmate_id,
                ])
    except OSError as e:
        raise OutputPathError(f"cannot write trace {path}: {e}")
    logger.debug(f"Wrote {len(records)} trace rows to {path}")
    return path


def _parse(raw: str, column: str, row: int, kind):
    try:
        return kind(raw)
    except ValueError:
        expected = "an integer" if kind is int else "a number"
        raise TraceFormatError(f"expected {expected}, got {raw!r}", row=row, column=column)


def read_trace(path) -> list[TraceRecord]:
    """
    Read a trace CSV written by write_trace.

    Raises:
        TraceFormatError: wrong header or column order, bad cell, ragged row,
            or iter decreasing within the file
    """
    path = Path(path)
    try:
        handle = open(path, newline="")
    except OSError as e:
        raise TraceFormatError(f"cannot read trace {path}: {e}", row=0)

    records = []
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError("empty file, expected a header", row=1)
        dim = len(header) - 5
        expected = trace_header(dim) if dim in (2, 3) else trace_header(2)
        for name, wanted in zip(header, expected):
            if name != wanted:
                raise TraceFormatError(f"expected column {wanted!r}, found {name!r}", row=1, column=name)
        if len(header) != len(expected):
            raise TraceFormatError(f"expected {len(expected)} columns, found {len(header)}", row=1)

        previous_iter = None
        for row_number, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise TraceFormatError(f"expected {len(expected)} cells, found {len(row)}", row=row_number)
            cells = dict(zip(expected, row))
            iteration = _parse(cells["iter"], "iter", row_number, int)
            if previous_iter is not None and iteration < previous_iter:
                raise TraceFormatError(
                    f"iter {iteration} follows {previous_iter}; iterations must not decrease",
                    row=row_number, column="iter",
                )
            previous_iter = iteration
            records.append(TraceRecord(
                iter=iteration,
                agent_id=_parse(cells["agent_id"], "agent_id", row_number, int),
                position=tuple(_parse(cells[axis], axis, row_number, float) for axis in AXES[:dim]),
                uv=_parse(cells["uv"], "uv", row_number, float),
                fitness=_parse(cells["fitness"], "fitness", row_number, float),
                lmate_id=_parse(cells["lmate_id"], "lmate_id", row_number, int),
            ))
    return records
