"""Exception types raised across the toolkit."""


class ErgoError(Exception):
    """Base class for every error raised by ergoblind."""


class ValidationError(ErgoError, ValueError):
    pass


class ShapeError(ValidationError):
    pass


class RowSumError(ValidationError):
    def __init__(self, message, pair=None, row=None):
        super().__init__(message)
        self.pair = pair
        self.row = row


class NegativeEntryError(ValidationError):
    pass


class RewardRangeError(ValidationError):
    pass


class InvalidBeliefError(ValidationError):
    pass


class PFAError(ValidationError):
    pass


class UnknownActionError(ErgoError, LookupError):
    pass


class UnknownSymbolError(ErgoError, LookupError):
    pass


class DomainError(ErgoError, ValueError):
    pass


class DegenerateInputError(ErgoError, ValueError):
    pass


class NotSinglePlayerError(ErgoError, ValueError):
    pass


class ParseError(ErgoError, ValueError):
    pass


class BudgetExceededError(ErgoError, RuntimeError):
    """A configured search budget ran out before the procedure could finish.

    Exponential procedures never truncate silently; they raise this instead.
    """


class NotErgodicError(ErgoError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
