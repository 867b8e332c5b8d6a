"""
Plain CSV traces: one "# key: value" comment line per metadata entry, then
the header and one row per sample.
"""
import io
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from omc_channel_sim.exceptions import DomainError, TraceParseError
from omc_channel_sim.traces import ConcentrationTrace, VoltageTrace

logger = logging.getLogger(__name__)

TIME_COLUMN = "time_s"
VOLTAGE_COLUMN = "voltage_v"
CONCENTRATION_COLUMN = "concentration_mg_per_l"
FLOAT_FORMAT = "%.9g"


@dataclass(frozen=True)
class RawTrace:
    """
    Voltage trace as recorded, possibly on a non-uniform time base.

    Attributes:
        timestamps (np.ndarray): Strictly increasing sample times in s.
        voltages (np.ndarray): Sample values in V.
        metadata (Dict[str, str]): Free-form entries such as session, geometry or T_sym.
    """

    timestamps: np.ndarray
    voltages: np.ndarray
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        timestamps = np.asarray(self.timestamps, dtype=float)
        voltages = np.asarray(self.voltages, dtype=float)
        if timestamps.ndim != 1 or timestamps.shape != voltages.shape:
            raise DomainError("timestamps and voltages must be one-dimensional and equally long")
        if np.any(np.diff(timestamps) <= 0):
            raise DomainError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "voltages", voltages)

    def __len__(self) -> int:
        return self.timestamps.size

    @property
    def start(self) -> float:
        return float(self.timestamps[0])

    @property
    def end(self) -> float:
        return float(self.timestamps[-1])

    @staticmethod
    def from_trace(trace: Union[VoltageTrace, ConcentrationTrace], metadata: Optional[Dict[str, str]] = None) -> "RawTrace":
        return RawTrace(timestamps=trace.times, voltages=trace.samples, metadata=dict(metadata or {}))


def _scan_lines(text: str) -> Tuple[Dict[str, str], List[Tuple[int, str]]]:
    """Splits a trace file into its metadata block and the numbered lines of the table."""
    metadata: Dict[str, str] = {}
    table: List[Tuple[int, str]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if not table:
                key, separator, value = stripped[1:].partition(":")
                if separator:
                    metadata[key.strip()] = value.strip()
            continue
        table.append((line_number, line))
    return metadata, table


def _read_table(table: List[Tuple[int, str]]) -> pd.DataFrame:
    try:
        return pd.read_csv(
            io.StringIO("\n".join(line for _, line in table)),
            header=None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except pd.errors.ParserError as error:
        match = re.search(r"line (\d+)", str(error))
        line_number = table[int(match.group(1)) - 1][0] if match and int(match.group(1)) <= len(table) else None
        raise TraceParseError(f"expected 2 columns ({error})", line_number) from error


def load_csv(path: str, value_column: str = VOLTAGE_COLUMN) -> RawTrace:
    """
    Reads a trace file.

    Lines starting with "#" before the header carry "key: value" metadata;
    later "#" lines are skipped. The header must read "time_s,<value_column>".
    Rows hold two finite decimal numbers with "." as separator; times must
    increase strictly.

    Args:
        path (str): File to read, UTF-8, LF or CRLF line endings.
        value_column (str): Expected name of the second column.

    Returns:
        RawTrace: The parsed trace.
    """
    expected_header = [TIME_COLUMN, value_column]
    try:
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
    except OSError as error:
        raise TraceParseError(f"cannot read {path}: {error}") from error
    except UnicodeDecodeError as error:
        raise TraceParseError(f"{path} is not valid UTF-8") from error

    metadata, table = _scan_lines(text)
    if not table:
        raise TraceParseError(f"missing header {','.join(expected_header)!r}")
    frame = _read_table(table)
    header = [str(cell).strip() for cell in frame.iloc[0]]
    if header != expected_header:
        raise TraceParseError(f"expected header {','.join(expected_header)!r}, got {','.join(header)!r}", table[0][0])
    rows = frame.iloc[1:]
    if rows.empty:
        raise TraceParseError("trace holds no samples")
    line_numbers = [line_number for line_number, _ in table[1:]]

    columns = []
    for position, name in enumerate(expected_header):
        cells = rows[position]
        values = pd.to_numeric(cells.str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0])
            raise TraceParseError(f"{name} value {cells.iloc[row]!r} is not a finite number", line_numbers[row])
        columns.append(values)
    times, values = columns

    stalled = np.flatnonzero(np.diff(times) <= 0)
    if stalled.size:
        row = int(stalled[0]) + 1
        raise TraceParseError(f"time {times[row]} does not increase past {times[row - 1]}", line_numbers[row])
    logger.debug("loaded %d samples from %s", times.size, path)
    return RawTrace(timestamps=times, voltages=values, metadata=metadata)


def save_csv(
    trace: Union[RawTrace, VoltageTrace, ConcentrationTrace],
    path: str,
    metadata: Optional[Dict[str, str]] = None,
    value_column: str = VOLTAGE_COLUMN,
):
    """
    Writes a trace with 9 significant digits, metadata first.

    Args:
        trace: Trace to write; uniform traces are written with their sample times.
        path (str): Output file.
        metadata (Optional[Dict[str, str]]): Entries written as "# key: value"; a
            RawTrace contributes its own metadata underneath.
        value_column (str): Name of the second column.
    """
    if isinstance(trace, RawTrace):
        entries = {**trace.metadata, **(metadata or {})}
        times, values = trace.timestamps, trace.voltages
    else:
        entries = dict(metadata or {})
        times, values = trace.times, trace.samples
    for key, value in entries.items():
        if any(mark in f"{key}{value}" for mark in "\r\n") or ":" in str(key):
            raise DomainError(f"metadata entry {key!r} cannot be written as a single \"# key: value\" line")
    frame = pd.DataFrame({TIME_COLUMN: times, value_column: values})
    with open(path, "w", encoding="utf-8", newline="") as file:
        for key, value in entries.items():
            file.write(f"# {key}: {value}\n")
        frame.to_csv(file, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def sanitize(raw: RawTrace, circuit_voltage: float) -> Tuple[RawTrace, int]:
    """
    Rejects non-finite samples and clips voltages into [0, V_c].

    Args:
        raw (RawTrace): Trace to check.
        circuit_voltage (float): Upper voltage bound V_c.

    Returns:
        Tuple[RawTrace, int]: The clipped trace and the number of clipped samples.
    """
    if not np.all(np.isfinite(raw.voltages)) or not np.all(np.isfinite(raw.timestamps)):
        raise DomainError("trace contains non-finite samples")
    clipped = np.clip(raw.voltages, 0.0, circuit_voltage)
    count = int(np.count_nonzero(clipped != raw.voltages))
    if count:
        logger.warning("clipped %d samples into [0, %g] V", count, circuit_voltage)
    return RawTrace(timestamps=raw.timestamps, voltages=clipped, metadata=raw.metadata), count


def average_traces(traces: Sequence[RawTrace], dt: float) -> RawTrace:
    """
    Averages repeated trials on a common uniform grid.

    Every trial is linearly interpolated onto the grid spanning the time range
    covered by all trials, then the samples are averaged.

    Args:
        traces (Sequence[RawTrace]): Trials to average.
        dt (float): Grid spacing in s.

    Returns:
        RawTrace: Averaged trace; metadata shared by all trials is kept and "trials" holds the count.
    """
    if not traces:
        raise DomainError("averaging needs at least one trace")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    start = max(trace.start for trace in traces)
    end = min(trace.end for trace in traces)
    if end < start:
        raise DomainError("traces do not overlap in time")
    times = start + np.arange(int(math.floor((end - start) / dt + 1e-9)) + 1) * dt
    stacked = np.vstack([np.interp(times, trace.timestamps, trace.voltages) for trace in traces])
    shared = {
        key: value
        for key, value in traces[0].metadata.items()
        if all(trace.metadata.get(key) == value for trace in traces[1:])
    }
    shared["trials"] = str(len(traces))
    return RawTrace(timestamps=times, voltages=stacked.mean(axis=0), metadata=shared)
