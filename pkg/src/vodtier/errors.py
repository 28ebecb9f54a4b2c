class ConfigurationError(ValueError):
    """Raised when model parameters cannot produce a valid draw or cost."""


class CalibrationError(RuntimeError):
    """Raised when a view scale cannot reach the requested FAV fraction."""
