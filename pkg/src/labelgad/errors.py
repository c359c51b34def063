class ConfigError(ValueError):
    """Bad configuration or command-line usage."""


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class NumericError(ArithmeticError):
    """Non-finite values or a failed numerical routine."""
