"""
Readers and writers for run artifacts.

configurations.csv    one row per draw: draw, x0, ..., x{N-1} (hard-edge scale)
configurations.jsonl  one object per draw: {draw, points, scale, seed}
trajectory.csv        long format: time, particle, position
*.hel                 binary frames, see write_hel1
"""
from typing import Iterable, List, Optional, Tuple
import json
import struct

import numpy as np
import pandas as pd
from pathlib2 import Path

from ensemble.configuration import PointConfiguration
from utils.errors import DomainError


HEL1_MAGIC = b"HEL1"
HEL1_HEADER = struct.Struct("<IdddI")
FLOAT_FORMAT = "%.17g"


def _path(path) -> Path:
    path = Path(str(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _points(config) -> np.ndarray:
    return np.asarray(config.points if isinstance(config, PointConfiguration) else config, dtype=float)


def write_configurations_csv(configurations: Iterable, path) -> Path:
    rows = np.stack([_points(c) for c in configurations])
    frame = pd.DataFrame(rows, columns=[f"x{i}" for i in range(rows.shape[1])])
    frame.insert(0, "draw", np.arange(rows.shape[0]))
    path = _path(path)
    frame.to_csv(str(path), index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_configurations_csv(path) -> List[PointConfiguration]:
    frame = pd.read_csv(str(path), float_precision="round_trip")
    if "draw" not in frame.columns:
        raise DomainError(f"{path} has no draw column")
    values = frame.drop(columns=["draw"]).to_numpy(dtype=float)
    return [PointConfiguration(row) for row in values]


def write_configurations_jsonl(configurations: Iterable, path, seed: Optional[int] = None) -> Path:
    path = _path(path)
    with path.open("w", encoding="utf-8") as f:
        for draw, config in enumerate(configurations):
            record = {"draw": draw, "points": [float(v) for v in _points(config)], "scale": "hardedge",
                      "seed": seed}
            f.write(json.dumps(record) + "\n")
    return path


def read_configurations_jsonl(path) -> List[PointConfiguration]:
    configurations = []
    with Path(str(path)).open("r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                configurations.append(PointConfiguration(record["points"], record.get("scale", "hardedge")))
    return configurations


def read_configurations(path) -> List[PointConfiguration]:
    """Configurations from a CSV or JSONL file, or from the first such file in a directory."""
    path = Path(str(path))
    if path.is_dir():
        candidates = sorted(path.glob("*.csv")) + sorted(path.glob("*.jsonl"))
        candidates = [c for c in candidates if c.name.startswith("configurations")]
        if not candidates:
            raise DomainError(f"no configurations file in {path}")
        path = candidates[0]
    if not path.exists():
        raise DomainError(f"{path} does not exist")
    if path.suffix == ".jsonl":
        return read_configurations_jsonl(path)
    return read_configurations_csv(path)


def write_trajectory_csv(bundle, path) -> Path:
    times = np.repeat(bundle.times, bundle.N)
    particles = np.tile(np.arange(bundle.N), bundle.times.size)
    frame = pd.DataFrame({"time": times, "particle": particles, "position": bundle.states.ravel()})
    path = _path(path)
    frame.to_csv(str(path), index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_hel1(bundle, path) -> Path:
    """
    Little-endian HEL1 frames: magic, header (uint32 N, float64 alpha,
    float64 dt_max, float64 dt_min, uint32 n_frames), then for every frame one
    float64 time followed by N float64 positions.
    """
    path = _path(path)
    frames = np.column_stack([bundle.times, bundle.states]).astype("<f8")
    with path.open("wb") as f:
        f.write(HEL1_MAGIC)
        f.write(HEL1_HEADER.pack(bundle.N, bundle.alpha, bundle.config.dt_max, bundle.config.dt_min,
                                 frames.shape[0]))
        f.write(frames.tobytes())
    return path


def read_hel1(path) -> Tuple[dict, np.ndarray, np.ndarray]:
    """Returns (header, times, states)."""
    data = Path(str(path)).read_bytes()
    if data[:4] != HEL1_MAGIC:
        raise DomainError(f"{path} is not a HEL1 file")
    N, alpha, dt_max, dt_min, n_frames = HEL1_HEADER.unpack_from(data, 4)
    body = np.frombuffer(data, dtype="<f8", offset=4 + HEL1_HEADER.size)
    if body.size != n_frames * (N + 1):
        raise DomainError(f"{path}: expected {n_frames} frames of {N} positions, found {body.size} values")
    frames = body.reshape(n_frames, N + 1)
    header = {"N": N, "alpha": alpha, "dt_max": dt_max, "dt_min": dt_min, "n_frames": n_frames}
    return header, frames[:, 0].copy(), frames[:, 1:].copy()
