class CdaAbmError(Exception):
    """Base exception for cda-abm."""
    pass

class ConfigError(CdaAbmError):
    """Configuration related errors."""
    pass

class ContractViolationError(CdaAbmError):
    """Raised when a caller breaks an engine contract (e.g. recording a step twice)."""
    pass

class OutputError(CdaAbmError):
    """Raised when an output location cannot be written."""
    pass

class MarketDivergedError(CdaAbmError):
    """Raised when prices run away beyond what a float can represent."""
    pass
