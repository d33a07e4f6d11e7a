"""Exception types raised across the package."""


class GFrameError(Exception):
    """Base class for all package errors."""


class GroupMismatchError(GFrameError, ValueError):
    """Operands belong to different groups or have the wrong shape."""


class BasisMismatchError(GFrameError, ValueError):
    """Operands are expressed in different bases."""


class NotNormalError(GFrameError, ValueError):
    pass


class NotHermitianError(GFrameError, ValueError):
    pass


class NotUnitaryError(GFrameError, ValueError):
    pass


class NotPhysicalError(GFrameError, ValueError):
    """Input is required to lie in the physical subspace but does not."""


class NotAlignableError(GFrameError, ValueError):
    pass


class CapExceededError(GFrameError, RuntimeError):
    """An exhaustive search would exceed its configured size cap."""


class ConfigError(GFrameError, ValueError):
    pass
