"""Exception types raised across the package.

Every exception carries a short ``code`` so the command-line front end can
print a machine-parsable error line.
"""


class QueueDmdError(Exception):
    code = "E_GENERIC"


class ShapeMismatchError(QueueDmdError, ValueError):
    code = "E_MISMATCH"


class WindowRangeError(QueueDmdError, IndexError):
    code = "E_RANGE"


class EmbeddingError(QueueDmdError, ValueError):
    code = "E_EMBEDDING"


class NumericInputError(QueueDmdError, ValueError):
    code = "E_NUMERIC"


class ConvergenceError(QueueDmdError, ArithmeticError):
    code = "E_CONVERGENCE"

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DegenerateRankError(QueueDmdError, ArithmeticError):
    code = "E_RANK"


class CoverageError(QueueDmdError, ValueError):
    code = "E_COVERAGE"


class ValidationError(QueueDmdError, ValueError):
    code = "E_VALIDATION"

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ConfigError(ValidationError):
    code = "E_CONFIG"


class ParseError(QueueDmdError, ValueError):
    code = "E_PARSE"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UndefinedMetricError(QueueDmdError, ValueError):
    code = "E_METRIC"
