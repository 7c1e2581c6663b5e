class VbsError(Exception):
    """Base class for errors raised by this package."""


class ModelParseError(VbsError):
    """A model or evidence document could not be read."""


class CapacityError(VbsError):
    """An exact computation would exceed its enumeration guard."""


class TotalConflictError(VbsError):
    """Dempster combination of fully contradictory evidence."""


class NoSolutionError(VbsError):
    """The search found no configuration with positive score."""
