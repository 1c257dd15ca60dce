"""Error types raised by the solver, each carrying the CLI exit code it maps to."""

from typing import Optional


class SolverError(Exception):
    """Base class for every error the solver raises on purpose."""

    exit_code = 2

    def __init__(self, detail: str):
        """
        Initialize error.

        Args:
            detail: Human readable description
        """
        super().__init__(detail)
        self.detail = detail


class ConfigurationError(SolverError, ValueError):
    """Invalid or inconsistent configuration value."""

    exit_code = 1

    def __init__(self, detail: str, key: Optional[str] = None, suggestion: Optional[str] = None):
        """
        Initialize configuration error.

        Args:
            detail: Human readable description
            key: Dotted config key at fault (e.g. 'grid.n_points')
            suggestion: Closest known key, when the key itself is unknown
        """
        message = f"{key}: {detail}" if key else detail
        if suggestion:
            message += f" (did you mean '{suggestion}'?)"
        super().__init__(message)
        self.key = key
        self.suggestion = suggestion


class ConfigParseError(ConfigurationError):
    """Config text that does not parse."""

    def __init__(self, detail: str, line_number: int):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


class RegimeError(SolverError, ValueError):
    """Reference formula requested outside its regime of validity."""

    exit_code = 1


class TrajectoryFormatError(SolverError):
    """Trajectory file with the wrong magic number or version."""

    exit_code = 1


class TrajectoryCorruptionError(TrajectoryFormatError):
    """Trajectory file that ends before its header says it should."""


class PropagationError(SolverError):
    """Non-finite amplitudes appeared while stepping."""

    def __init__(self, detail: str, step_index: int):
        super().__init__(f"step {step_index}: {detail}")
        self.step_index = step_index


class UndefinedValueError(SolverError, ValueError):
    """Quantity undefined for the given input (zero norm, all-zero amplitudes)."""


class ContractError(SolverError, ValueError):
    """Inputs that break a function's contract (mismatched binning, too few points)."""
