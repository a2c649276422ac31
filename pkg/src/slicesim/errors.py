"""Exception types shared across the package."""


class SliceSimError(Exception):
    """Base class for package errors."""


class ConfigError(SliceSimError):
    """Bad, missing, or unknown configuration input."""


class InfeasibleLayoutError(SliceSimError):
    """Deployment sampling could not satisfy separation constraints."""


class CheckpointError(SliceSimError):
    """Checkpoint file is missing, corrupt, or mismatched."""
