"""Exception hierarchy shared by every module in the package."""


class PrivcodeError(Exception):
    """Base class for all errors raised by privcode."""


class DistributionError(PrivcodeError, ValueError):
    pass


class NegativeMass(DistributionError):
    pass


class MassNotOne(DistributionError):
    pass


class EmptyAlphabet(DistributionError):
    pass


class DomainError(PrivcodeError, ValueError):
    pass


class DegenerateJoint(PrivcodeError, ValueError):
    pass


class EpsOutOfRange(PrivcodeError, ValueError):
    pass


class DegenerateX(EpsOutOfRange):
    pass


class ZeroMassPair(PrivcodeError, ValueError):
    pass


class EmptySupport(PrivcodeError, ValueError):
    pass


class UnknownSymbol(PrivcodeError, KeyError):
    pass


class TruncatedStream(PrivcodeError, ValueError):
    pass


class MalformedCodeword(PrivcodeError, ValueError):
    pass


class IndexOutOfRange(PrivcodeError, IndexError):
    pass


class KeyOutOfRange(IndexOutOfRange):
    pass


class ThresholdNotMet(PrivcodeError, ValueError):
    pass


class BadSeparation(PrivcodeError, ValueError):
    pass


class NotFunctional(PrivcodeError, ValueError):
    pass


class EmptyFeasibleSet(PrivcodeError, ValueError):
    pass


class BudgetExceeded(PrivcodeError, RuntimeError):
    pass


class ParseError(PrivcodeError, ValueError):
    pass
