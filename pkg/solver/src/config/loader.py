"""Reads and writes the sectioned key-value config format.

    [grid]
    x_min = -30.0
    x_max = 30.0
    n_points = 2048

    [potential]
    kind = sum

    [potential.members.0]
    kind = rectangular
    v0 = 4.5
    width = 1.0

Dotted section names nest; numeric components become list positions.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Union

from pydantic import BaseModel, ValidationError
from rapidfuzz import fuzz, process

from ..physics import potentials
from ..utils.errors import ConfigParseError, ConfigurationError
from ..utils.text_processor import TextProcessor
from .models import SimulationConfig
from .patterns import PatternMatcher

logger = logging.getLogger(__name__)

SUGGESTION_CUTOFF = 70
SECTION_ORDER = ('grid', 'units', 'wavepacket', 'potential', 'absorber', 'dephasing', 'stepping', 'partition')
POTENTIAL_KINDS = ('rectangular', 'gaussian', 'sum', 'tabulated', 'free', 'modulated')


def parse_config_text(text: str) -> Dict[str, Any]:
    """
    Parse config text into a nested dictionary.

    Args:
        text: Config file contents

    Returns:
        Nested dict keyed by section path; numbered sections become lists

    Raises:
        ConfigParseError: On malformed lines, duplicate keys, assignments outside a section, or empty input
    """
    root: Dict[str, Any] = {}
    section: Optional[Dict[str, Any]] = None
    saw_content = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = TextProcessor.normalize(raw)
        if not line:
            continue
        saw_content = True

        path = PatternMatcher.match_section(line)
        if path is not None:
            section = root
            for part in path.split('.'):
                child = section.setdefault(part, {})
                if not isinstance(child, dict):
                    raise ConfigParseError(f"section [{path}] collides with key '{part}'", number)
                section = child
            continue

        assignment = PatternMatcher.match_assignment(line)
        if assignment is None:
            raise ConfigParseError(f"cannot parse '{line}'", number)
        if section is None:
            raise ConfigParseError("assignment before the first section header", number)
        key, value_text = assignment
        if key in section:
            raise ConfigParseError(f"duplicate key '{key}'", number)
        section[key] = TextProcessor.to_value(value_text)

    if not saw_content:
        raise ConfigParseError("config is empty", 1)
    return _lists_from_numbered(root)


def _lists_from_numbered(node: Any) -> Any:
    if not isinstance(node, dict):
        return node
    converted = {key: _lists_from_numbered(value) for key, value in node.items()}
    if converted and all(key.isdigit() for key in converted):
        return [converted[key] for key in sorted(converted, key=int)]
    return converted


def _known_keys() -> Set[str]:
    models = [SimulationConfig]
    keys: Set[str] = set()
    seen = set()
    while models:
        model = models.pop()
        if model in seen:
            continue
        seen.add(model)
        keys.update(model.model_fields)
        for field in model.model_fields.values():
            annotation = field.annotation
            if isinstance(annotation, type) and issubclass(annotation, BaseModel):
                models.append(annotation)
    for name in dir(potentials):
        candidate = getattr(potentials, name)
        if isinstance(candidate, type) and issubclass(candidate, potentials.PotentialBase):
            keys.update(candidate.model_fields)
    return keys


def suggest_key(key: str) -> Optional[str]:
    """Closest known config key, or None below the similarity cutoff."""
    match = process.extractOne(key, sorted(_known_keys()), scorer=fuzz.ratio, score_cutoff=SUGGESTION_CUTOFF)
    return match[0] if match else None


def _dotted(location: tuple) -> str:
    # drop discriminator tags pydantic inserts into union locations
    parts = [str(part) for part in location if part not in POTENTIAL_KINDS]
    return '.'.join(parts)


def _configuration_error(error: ValidationError) -> ConfigurationError:
    first = error.errors()[0]
    key = _dotted(first['loc'])
    if first['type'] == 'extra_forbidden':
        unknown = str(first['loc'][-1])
        return ConfigurationError("unknown key", key=key, suggestion=suggest_key(unknown))
    return ConfigurationError(first['msg'], key=key or None)


def config_from_dict(data: Dict[str, Any]) -> SimulationConfig:
    """
    Validate a parsed config dictionary.

    Raises:
        ConfigurationError: Naming the dotted key of the first failing field
    """
    try:
        return SimulationConfig.model_validate(data)
    except ValidationError as error:
        raise _configuration_error(error) from None


def parse_config(text: str) -> SimulationConfig:
    """Parse and validate config text."""
    return config_from_dict(parse_config_text(text))


def load_config(path: Union[str, Path]) -> SimulationConfig:
    """
    Load and validate a config file.

    Args:
        path: Config file path

    Returns:
        SimulationConfig

    Raises:
        ConfigurationError: If the file is missing, does not parse, or fails validation
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"no such config file: {path}")
    config = parse_config(path.read_text(encoding='utf-8'))
    logger.debug(f"loaded config {path}")
    return config


def _emit(path: str, data: Dict[str, Any], lines: List[str]) -> None:
    scalars = [(key, value) for key, value in data.items() if value is not None and not _is_nested(value)]
    if scalars:
        lines.append(f"[{path}]")
        lines.extend(f"{key} = {TextProcessor.format_value(value)}" for key, value in scalars)
        lines.append("")
    for key, value in data.items():
        if isinstance(value, dict):
            _emit(f"{path}.{key}", value, lines)
        elif _is_nested(value):
            for index, item in enumerate(value):
                _emit(f"{path}.{key}.{index}", item, lines)


def _is_nested(value: Any) -> bool:
    if isinstance(value, dict):
        return True
    return isinstance(value, list) and bool(value) and isinstance(value[0], dict)


def dump_config(config: SimulationConfig) -> str:
    """
    Render a config back into the sectioned text format.

    Omitted optional values (auto stride, unset partition bounds) stay omitted,
    so load -> dump -> load returns an equal config.

    Args:
        config: Validated config

    Returns:
        Config text
    """
    data = config.model_dump()
    lines: List[str] = []
    for section in SECTION_ORDER:
        _emit(section, data[section], lines)
    return '\n'.join(lines).rstrip() + '\n'
