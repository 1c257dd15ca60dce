"""Binary trajectory container.

Layout (little-endian):
    header   64 bytes: magic b"QT1DTRAJ", version u32, n_points u64, n_frames u64, dx f64, x_min f64, 20 pad bytes
    frames   n_frames x (time f64, n_points x (re f64, im f64))
    trailer  count u64, count x (time, norm, E_kin, E_pot, <x>) f64
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..physics.propagator import Trajectory
from ..utils.errors import SolverError, TrajectoryCorruptionError, TrajectoryFormatError

logger = logging.getLogger(__name__)

MAGIC = b"QT1DTRAJ"
FORMAT_VERSION = 1
HEADER = struct.Struct('<8sIQQdd20x')
TIME = struct.Struct('<d')
COUNT = struct.Struct('<Q')
AMPLITUDE_DTYPE = np.dtype('<c16')
SCALAR_DTYPE = np.dtype('<f8')
SCALAR_COLUMNS = 5


def save_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> None:
    """
    Write a trajectory to the binary container.

    Args:
        trajectory: Trajectory to store
        path: Output file

    Raises:
        SolverError: If the file cannot be written
    """
    path = Path(path)
    chunks = [HEADER.pack(MAGIC, FORMAT_VERSION, trajectory.n_points, len(trajectory.frames), trajectory.dx, trajectory.x_min)]
    for time, amplitudes in trajectory.frames:
        chunks.append(TIME.pack(time))
        chunks.append(np.asarray(amplitudes, dtype=AMPLITUDE_DTYPE).tobytes())
    chunks.append(COUNT.pack(trajectory.scalars.shape[0]))
    chunks.append(np.asarray(trajectory.scalars, dtype=SCALAR_DTYPE).tobytes())
    try:
        path.write_bytes(b''.join(chunks))
    except OSError as error:
        raise SolverError(f"{path}: cannot write trajectory ({error})") from error
    logger.info(f"wrote {len(trajectory.frames)} frames to {path}")


def load_trajectory(path: Union[str, Path]) -> Trajectory:
    """
    Read a trajectory written by save_trajectory.

    The absorbed probability is recovered as the norm lost since the first record.

    Args:
        path: Trajectory file

    Returns:
        Trajectory with bit-identical frames and scalars

    Raises:
        TrajectoryFormatError: On a missing file, wrong magic or unsupported version
        TrajectoryCorruptionError: If the file ends early
    """
    path = Path(path)
    if not path.is_file():
        raise TrajectoryFormatError(f"{path}: no trajectory file")
    data = path.read_bytes()
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise TrajectoryFormatError(f"{path}: not a trajectory file (bad magic)")
    if len(data) < HEADER.size:
        raise TrajectoryCorruptionError(f"{path}: truncated header")

    _, version, n_points, n_frames, dx, x_min = HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise TrajectoryFormatError(f"{path}: unsupported format version {version}")

    frame_bytes = TIME.size + n_points * AMPLITUDE_DTYPE.itemsize
    offset = HEADER.size
    if len(data) < offset + n_frames * frame_bytes + COUNT.size:
        raise TrajectoryCorruptionError(f"{path}: file ends inside the frame block")

    frames = []
    for _ in range(n_frames):
        (time,) = TIME.unpack_from(data, offset)
        amplitudes = np.frombuffer(data, dtype=AMPLITUDE_DTYPE, count=n_points, offset=offset + TIME.size)
        frames.append((time, amplitudes.astype(np.complex128)))
        offset += frame_bytes

    (count,) = COUNT.unpack_from(data, offset)
    offset += COUNT.size
    expected = count * SCALAR_COLUMNS * SCALAR_DTYPE.itemsize
    if len(data) < offset + expected:
        raise TrajectoryCorruptionError(f"{path}: file ends inside the scalar block")
    scalars = np.frombuffer(data, dtype=SCALAR_DTYPE, count=count * SCALAR_COLUMNS, offset=offset)
    scalars = scalars.astype(np.float64).reshape(count, SCALAR_COLUMNS)

    return Trajectory(frames, scalars, x_min, dx, n_points)
