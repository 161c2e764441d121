"""Exception types shared across the toolkit."""


class AstutekitError(Exception):
    """Base class for all toolkit errors."""


class QueryOutsideSupport(AstutekitError):
    """The class-probability function is undefined at the queried point."""


class EmptySupportSet(AstutekitError):
    """A distance query named a support set (or union) with no primitives."""


class KappaOutOfRange(AstutekitError):
    """Region shrink factor must lie in (0, 1]."""


class UnboundedRegion(AstutekitError):
    """The robustness region cannot be certified bounded (shrink factor 1)."""


class EmptyDataset(AstutekitError):
    """Classifiers cannot be fitted to zero samples."""


class KTooLarge(AstutekitError):
    """Requested neighbor count exceeds the dataset size."""


class NTooSmall(AstutekitError):
    """Bandwidth schedules need n >= 2."""


class EnumerationTooLarge(AstutekitError):
    """Brute-force subset enumeration guard (n or d over the cap)."""


class EmptySeries(AstutekitError):
    """Plot emission requires at least one data series."""


class ConfigError(AstutekitError):
    """Experiment config failed validation; message carries line/field info."""
