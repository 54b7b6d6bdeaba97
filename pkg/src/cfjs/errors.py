"""Exception types raised across the package."""


class CfjsError(ValueError):
    """Base class for every error raised by cfjs."""


# input validation
class NegativeEntryError(CfjsError):
    pass


class NotNormalizedError(CfjsError):
    pass


class LengthMismatchError(CfjsError):
    pass


class TooFewOptionsError(CfjsError):
    pass


class DimensionMismatchError(CfjsError):
    pass


class IndexOutOfRangeError(CfjsError, IndexError):
    pass


# metrics
class DivisionByZeroOptimalLossError(CfjsError, ZeroDivisionError):
    """MAPE is undefined when an optimal loss is exactly zero."""


# optimal constructions
class PreconditionMaxPopularityError(CfjsError):
    """The capped construction needs some popularity above 1."""


class PreconditionPopularityExceedsOneError(CfjsError):
    """A zero-loss matrix exists only when every popularity is at most 1."""


class ConstructionFailedError(CfjsError):
    pass


# quantum models
class ZeroUsageError(CfjsError):
    """No photon pair can ever exit on opposite sides."""


class DegenerateProductError(CfjsError):
    """All product mass A_i * B_j sits on the diagonal."""


class HalfPreferenceSingularityError(CfjsError):
    """Closed-form amplitudes are undefined when some preference is 1/2."""


class DegeneratePhasesError(CfjsError):
    pass


# samplers / experiments
class DeadEndError(CfjsError):
    """Random Order strands the second player with no admissible option.

    ``player`` is the player left without options and ``option`` the
    option taken by the first mover.
    """

    def __init__(self, message, player=None, option=None):
        super().__init__(message)
        self.player = player
        self.option = option


class UnknownCaseError(CfjsError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class RejectionBudgetExceededError(CfjsError, RuntimeError):
    pass
