"""Exception types shared by the assessment modules, plus the numeric field checks that raise them."""
import math
import numbers


class GeothermalError(Exception):
    pass


class DomainError(GeothermalError, ValueError):
    """Input outside the physical domain of an operation."""


class ConfigurationError(GeothermalError):
    """A project, calibration or ranges document violates an invariant."""

    def __init__(self, field, rule, line=None, column=None):
        self.field = field
        self.rule = rule
        self.line = line
        self.column = column
        super().__init__(self._message())

    def _message(self):
        location = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        if self.field:
            return f"{self.field}: {self.rule}{location}"
        return f"{self.rule}{location}"

    def with_prefix(self, section):
        field = f"{section}.{self.field}" if self.field else section
        return ConfigurationError(field, self.rule, self.line, self.column)


class UndefinedMetricError(GeothermalError):
    pass


class NoPaybackError(UndefinedMetricError):
    pass


class MonteCarloAbort(GeothermalError):
    pass


def _is_real(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def require_finite(field, value):
    """Reject non-numbers, NaN and infinities; None is left to the caller."""
    if value is None:
        return None
    if not _is_real(value) or not math.isfinite(value):
        raise ConfigurationError(field, f'must be a finite number, got {value!r}')
    return value


def require_whole(field, value):
    """A whole number as int; 25.0 is accepted, 25.5 and true are not."""
    if not _is_real(value) or not math.isfinite(value) or value != int(value):
        raise ConfigurationError(field, f'must be a whole number, got {value!r}')
    return int(value)
