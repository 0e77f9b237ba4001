"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed edge-list or configuration input."""


class ResourceError(RuntimeError):
    """A dense simulation or enumeration would exceed its configured budget."""


class PostselectionError(RuntimeError):
    """An ancilla outcome that should occur with certainty was (nearly) impossible."""


class EmptyGraphError(ValueError):
    """The operation needs at least one edge."""


class ConfigError(ParseError):
    """Invalid sweep configuration."""


class UndefinedCellError(ValueError):
    """Normalized RMSE is undefined because the mean true count is zero."""
