"""JSON reports and the per-frame density CSV export."""

import json
import math
import re
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..physics.propagator import Trajectory
from ..utils.errors import SolverError

SCHEMA_VERSION = 1
FLOAT_FORMAT = '.17g'
_FLOAT_TOKEN = re.compile(r'"\\u0000([-+.0-9eE]+)\\u0000"')


def _clean(value: Any) -> Any:
    # JSON has no NaN/inf
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    return value


def format_float(value: float) -> str:
    """17 significant digits, keeping a decimal point so the value reads back as a float."""
    text = format(value, FLOAT_FORMAT)
    return text if any(marker in text for marker in '.e') else text + '.0'


def _float_tokens(value: Any) -> Any:
    # floats become NUL-fenced strings that render_report unquotes after dumping
    if isinstance(value, float):
        return f"\x00{format_float(value)}\x00"
    if isinstance(value, dict):
        return {key: _float_tokens(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_float_tokens(item) for item in value]
    return value


def report_payload(report: Union[BaseModel, Dict[str, Any]], kind: str) -> Dict[str, Any]:
    """
    Report contents as a JSON-ready dict with schema_version and kind fields.

    Args:
        report: Pydantic report model or plain dict
        kind: Report kind ('scattering', 'analysis', 'comparison', 'reference', 'manifest')

    Returns:
        Dict with only JSON types
    """
    body = report.model_dump(mode='json') if isinstance(report, BaseModel) else dict(report)
    return _clean({'schema_version': SCHEMA_VERSION, 'kind': kind, **body})


def render_report(report: Union[BaseModel, Dict[str, Any]], kind: str) -> str:
    """Serialize a report; every float is written with 17 significant digits."""
    text = json.dumps(_float_tokens(report_payload(report, kind)), indent=2, sort_keys=False)
    return _FLOAT_TOKEN.sub(r'\1', text) + '\n'


def write_report(report: Union[BaseModel, Dict[str, Any]], path: Union[str, Path], kind: str) -> None:
    """
    Write a report as JSON.

    Raises:
        SolverError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.write_text(render_report(report, kind), encoding='utf-8')
    except OSError as error:
        raise SolverError(f"{path}: cannot write report ({error})") from error


def read_report(path: Union[str, Path]) -> Dict[str, Any]:
    """Load a JSON report."""
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def density_frame(trajectory: Trajectory) -> pd.DataFrame:
    """|psi|^2 table: one row per grid position, one column per frame time."""
    densities = np.column_stack([np.abs(amplitudes) ** 2 for _, amplitudes in trajectory.frames])
    frame = pd.DataFrame(densities, index=pd.Index(trajectory.grid.positions, name='x'), columns=trajectory.times)
    frame.columns.name = 't'
    return frame


def write_density_csv(trajectory: Trajectory, path: Union[str, Path]) -> None:
    """
    Export per-frame |psi|^2 to CSV.

    Raises:
        SolverError: If the file cannot be written
    """
    try:
        density_frame(trajectory).to_csv(path, float_format='%.17g')
    except OSError as error:
        raise SolverError(f"{path}: cannot write density table ({error})") from error
