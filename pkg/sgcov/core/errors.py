"""Exception hierarchy shared by the analytic engines, simulator and CLI."""


class SgcovError(Exception):
    """Base class for all sgcov errors."""


class ParameterError(SgcovError, ValueError):
    """An operation was called with inputs outside its domain."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.field}: {msg}" if self.field else msg


class ConfigError(ParameterError):
    """A run configuration file could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        *,
        key_path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        super().__init__(message, field=key_path)
        self.key_path = key_path
        self.line = line
        self.column = column

    def __str__(self) -> str:
        msg = super().__str__()
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {msg}"
        return msg


class QuadratureError(SgcovError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    ``estimate`` and ``error`` hold the best value reached; ``level`` names the
    integration level that failed when integrals are nested.
    """

    def __init__(self, message: str, estimate: float, error: float, level: str | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.level = level

    def __str__(self) -> str:
        msg = super().__str__()
        where = f" [{self.level}]" if self.level else ""
        return f"{msg}{where} (best estimate {self.estimate:.6g} ± {self.error:.3g})"


class SimulationError(SgcovError, RuntimeError):
    """A Monte Carlo run had to be aborted."""


def require(condition: bool, message: str, field: str | None = None) -> None:
    """Raise ``ParameterError`` unless ``condition`` holds."""
    if not condition:
        raise ParameterError(message, field=field)
