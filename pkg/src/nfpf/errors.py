"""Exception hierarchy shared by every nfpf module."""


class NfpfError(Exception):
    """Base class for all errors raised by nfpf."""


class NonFinite(NfpfError, ValueError):
    pass


class SolveFailure(NfpfError, ArithmeticError):
    pass


class DimensionMismatch(NfpfError, ValueError):
    pass


class InvalidHiddenSize(NfpfError, ValueError):
    pass


class ActivationRangeError(NfpfError, ArithmeticError):
    """The reconstruction target could not be mapped into the activation's invertible range."""


class TooManyClusters(NfpfError, ValueError):
    pass


class NeedTwoClusters(NfpfError, ValueError):
    pass


class BudgetTooLarge(NfpfError, ValueError):
    pass


class BudgetExceeded(NfpfError, ValueError):
    pass


class RankTooLarge(NfpfError, ValueError):
    pass


class ConfigInvalid(NfpfError, ValueError):
    """Invalid configuration. ``field`` names the offending entry when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EmptyTestSet(NfpfError, ValueError):
    pass


class BadRatio(NfpfError, ValueError):
    pass


class TooSmall(NfpfError, ValueError):
    pass


class DataError(NfpfError):
    """Problems with input data files."""


class EmptyFile(DataError, ValueError):
    pass


class RaggedRows(DataError, ValueError):
    pass


class ParseError(DataError, ValueError):
    def __init__(self, row, col, value):
        super().__init__(f"cannot parse {value!r} as a number at row {row}, column {col}")
        self.row = row
        self.col = col
        self.value = value


class HashMismatch(DataError):
    pass


class MissingClassWarning(UserWarning):
    """A class has no samples in the training subset; it will never be predicted."""
