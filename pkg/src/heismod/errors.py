"""Exception hierarchy shared by every module of the package."""


class HeisError(Exception):
    """Base class for all package errors."""


class InversionAtOrigin(HeisError, ZeroDivisionError):
    pass


class PsiOutOfRange(HeisError, ValueError):
    pass


class OnVerticalAxis(HeisError, ValueError):
    pass


class DerivOracleFailure(HeisError, ArithmeticError):
    pass


class CharacteristicPoint(HeisError, ValueError):
    pass


class DegenerateDerivative(HeisError, ArithmeticError):
    pass


class QuadratureNonConvergence(HeisError, ArithmeticError):
    pass


class PointNotOnFoliation(HeisError, ValueError):
    pass


class KOutOfRange(HeisError, ValueError):
    pass


class ZeroDenominator(HeisError, ZeroDivisionError):
    pass


class UnknownMap(HeisError, KeyError):
    pass


class SpecParse(HeisError, ValueError):
    pass


class NotLeafConstant(HeisError, ValueError):
    pass
