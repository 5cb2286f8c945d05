"""Exception hierarchy.

Every error carries a ``category`` (its class name) and the CLI exit code
it maps to: 2 parse, 3 precondition, 4 search-cap exhaustion, 5 internal
ledger violation.
"""


class RTauError(Exception):
    exit_code = 3

    @property
    def category(self) -> str:
        return type(self).__name__


class ParseError(RTauError):
    exit_code = 2

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ZeroDenominator(RTauError):
    pass


class DenominatorZero(ZeroDenominator, ParseError):
    exit_code = 2


class PreconditionError(RTauError):
    pass


class ZeroPolynomial(PreconditionError):
    pass


class ConstantInput(PreconditionError):
    pass


class DegreeTooLarge(PreconditionError):
    pass


class NonCoprimeModuli(PreconditionError):
    pass


class NotIncreasing(PreconditionError):
    pass


class NotInS(PreconditionError):
    pass


class InfiniteValuation(PreconditionError):
    pass


class UnknownComponent(PreconditionError):
    def __init__(self, message: str, prime: int | None = None):
        super().__init__(message)
        self.prime = prime


class SearchExhausted(RTauError):
    exit_code = 4


class ValuationUnresolvable(SearchExhausted):
    pass


class LefschetzSearchExhausted(SearchExhausted):
    pass


class ExhaustedPrimes(SearchExhausted):
    pass


class QuotaUnmet(SearchExhausted):
    def __init__(self, message: str, poly=None):
        super().__init__(message)
        self.poly = poly


class LedgerViolation(RTauError):
    exit_code = 5


class NoResidue(LedgerViolation):
    def __init__(self, message: str, prime: int | None = None):
        super().__init__(message)
        self.prime = prime
