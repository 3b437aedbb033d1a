"""Trajectory CSV files.

Columns: ``t``, then ``x{i}_{k}`` for every agent ``i`` and component ``k``
(1-based), then ``v{i}_{k}`` in the same order, then ``z_T_norm`` and,
when a certified bound is available, ``envelope``.  Floats are written with
``repr`` so they parse back to the identical binary value.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import EdgeQuantError

__all__ = ["CSVFormatError", "TrajectoryTable", "write_trajectory_csv", "read_trajectory_csv"]

_STATE = re.compile(r"^([xv])(\d+)_(\d+)$")


class CSVFormatError(EdgeQuantError, ValueError):
    pass


@dataclass(frozen=True)
class TrajectoryTable:
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    z_T_norm: np.ndarray
    envelope: np.ndarray | None

    @property
    def num_samples(self) -> int:
        return self.times.size


def _header(N: int, n: int, with_envelope: bool) -> list[str]:
    cols = ["t"]
    cols += [f"x{i}_{k}" for i in range(1, N + 1) for k in range(1, n + 1)]
    cols += [f"v{i}_{k}" for i in range(1, N + 1) for k in range(1, n + 1)]
    cols.append("z_T_norm")
    if with_envelope:
        cols.append("envelope")
    return cols


def write_trajectory_csv(traj: Trajectory, path: str | os.PathLike, envelope=None) -> None:
    S, N, n = traj.x.shape
    columns = [traj.times[:, None], traj.x.reshape(S, N * n), traj.v.reshape(S, N * n),
               traj.z_T_norm[:, None]]
    if envelope is not None:
        columns.append(np.asarray(envelope, dtype=float).reshape(S, 1))
    data = np.hstack(columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(N, n, envelope is not None))
        for row in data:
            writer.writerow([repr(float(val)) for val in row])


def read_trajectory_csv(path: str | os.PathLike) -> TrajectoryTable:
    """Parse a file written by :func:`write_trajectory_csv`.

    Raises
    ------
    CSVFormatError
        With the 1-based row number for malformed content, or "no samples"
        when the file has a header but no data.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CSVFormatError(f"{path}: empty file (no header)")
    header = rows[0]
    if not header or header[0] != "t" or "z_T_norm" not in header:
        raise CSVFormatError(f"{path}:1: header must start with 't' and contain 'z_T_norm'")
    states = [_STATE.match(col) for col in header[1 : header.index("z_T_norm")]]
    if any(m is None for m in states) or len(states) % 2:
        raise CSVFormatError(f"{path}:1: unrecognised state columns")
    N = max(int(m.group(2)) for m in states) if states else 0
    n = max(int(m.group(3)) for m in states) if states else 0
    if len(states) != 2 * N * n or header[1 : 1 + 2 * N * n] != _header(N, n, False)[1:-1]:
        raise CSVFormatError(f"{path}:1: state columns are not in agent/component order")
    tail = header[header.index("z_T_norm") :]
    if tail not in (["z_T_norm"], ["z_T_norm", "envelope"]):
        raise CSVFormatError(f"{path}:1: unexpected trailing columns {tail}")

    body = [r for r in rows[1:] if r]
    if not body:
        raise CSVFormatError(f"{path}: no samples")
    data = np.empty((len(body), len(header)))
    filled = 0
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CSVFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            data[filled] = [float(val) for val in row]
        except ValueError:
            raise CSVFormatError(f"{path}:{lineno}: non-numeric field") from None
        filled += 1

    S = data.shape[0]
    x = data[:, 1 : 1 + N * n].reshape(S, N, n)
    v = data[:, 1 + N * n : 1 + 2 * N * n].reshape(S, N, n)
    env = data[:, -1] if tail[-1] == "envelope" else None
    return TrajectoryTable(data[:, 0], x, v, data[:, 1 + 2 * N * n], env)
