"""Exception hierarchy.

Every error carries a stable ``code`` used by the CLI as its exit status, and
an optional ``stage`` the pipeline fills in when re-raising.
"""


class ThetaLiftError(Exception):
    code = 1

    def __init__(self, message="", stage=None):
        super().__init__(message)
        self.stage = stage


# field construction and arithmetic
class NotPrime(ThetaLiftError):
    code = 10


class EvenCharacteristic(ThetaLiftError):
    code = 11


class NotIrreducible(ThetaLiftError):
    code = 12


class ZeroInverse(ThetaLiftError):
    code = 13


class ContextMismatch(ThetaLiftError):
    code = 14


class NoRoot(ThetaLiftError):
    code = 15


class SingularCurve(ThetaLiftError):
    code = 16


# p-adic ring
class NonUnitInverse(ThetaLiftError):
    code = 20


class NonUnit(ThetaLiftError):
    code = 21


class BranchMismatch(ThetaLiftError):
    code = 22


class PrecisionError(ThetaLiftError):
    code = 23


# Artin-Schreier solver
class ContractionViolated(ThetaLiftError):
    code = 30


# relations
class MissingSecondPoint(ThetaLiftError):
    code = 40


# lifting
class DegenerateInput(ThetaLiftError):
    code = 50


class Supersingular(ThetaLiftError):
    code = 51


class SingularSpecialFiber(ThetaLiftError):
    code = 52


class SplitLocus(ThetaLiftError):
    code = 53


class RankDeficient(ThetaLiftError):
    code = 54


class NoValidTriple(ThetaLiftError):
    code = 55


class NotOnModuli(ThetaLiftError):
    code = 56


# invariants
class SplitOrDegenerate(ThetaLiftError):
    code = 60


class DegenerateDenominator(ThetaLiftError):
    code = 61


class DegenerateTheta(ThetaLiftError):
    code = 62


class FieldTooLarge(ThetaLiftError):
    code = 63


# lattice reconstruction
class DependentRows(ThetaLiftError):
    code = 70


class NoRelationFound(ThetaLiftError):
    code = 71


# configuration / IO
class ConfigError(ThetaLiftError):
    code = 80
