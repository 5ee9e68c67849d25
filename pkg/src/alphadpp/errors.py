"""Exception types raised by alphadpp."""


class AlphaDPPError(Exception):
    """Base class for all package errors."""


class InvalidAlpha(AlphaDPPError, ValueError):
    pass


class InvalidMatrix(AlphaDPPError, ValueError):
    pass


class DimensionTooLarge(AlphaDPPError, ValueError):
    pass


class EmptySubset(AlphaDPPError, ValueError):
    pass


class EmptyExpansion(AlphaDPPError, ValueError):
    pass


class SingularOperator(AlphaDPPError, ArithmeticError):
    """I + alpha K (restricted to some subset) is not invertible."""


class OutsideConvergenceDomain(AlphaDPPError, ValueError):
    pass


class NotHermitian(AlphaDPPError, ValueError):
    pass


class NotRealSymmetric(AlphaDPPError, ValueError):
    pass


class NonRealWeight(AlphaDPPError, ValueError):
    """A probability weight came out complex; the kernel defines no process."""


class NegativeWeight(AlphaDPPError, ValueError):
    """A probability weight came out negative; the kernel defines no process."""


class TruncationFailure(AlphaDPPError, RuntimeError):
    pass


class KernelFileError(AlphaDPPError, ValueError):
    pass
