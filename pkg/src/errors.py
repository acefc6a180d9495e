"""
Error definitions for the witness toolkit.
"""


class EwsError(Exception):
    pass


# Malformed or out-of-range input
class InputError(EwsError):
    pass


class NotHermitian(InputError):
    pass


class LengthMismatch(InputError):
    pass


class NormViolation(InputError):
    pass


class RankTooLarge(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class BadParam(InputError):
    pass


class BadParams(InputError):
    pass


class TraceViolation(InputError):
    pass


class BadSpectrum(InputError):
    pass


class BadRank(InputError):
    pass


class MalformedMatrix(InputError):
    pass


class UnknownSuite(InputError):
    pass


class UnknownState(InputError):
    pass


# Numerical failures
class ComputationError(EwsError):
    pass


class NoConvergence(ComputationError):
    pass


class NoConvergedRestart(ComputationError):
    """Carries the best non-converged restart, if any ran."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class OptFailed(ComputationError):
    pass


class EpsilonVanishes(ComputationError):
    pass


class BoostDenominatorZero(ComputationError):
    pass


# Witness construction preconditions
class CertificationError(EwsError):
    pass


class NotPPT(CertificationError):
    pass


class FullRank(CertificationError):
    pass


class ProductState(CertificationError):
    pass


class OrthogonalityFail(CertificationError):
    pass


class IsPPT(CertificationError):
    pass
