"""Exception hierarchy shared by all critfan modules."""


class CritfanError(Exception):
    """Base class for every error raised by critfan."""


# exact geometry
class DimensionMismatch(CritfanError, ValueError):
    pass


class DimensionTooLarge(CritfanError, ValueError):
    pass


class PointednessViolation(CritfanError, ValueError):
    pass


class NotInFan(CritfanError, KeyError):
    pass


class RefinementObstruction(CritfanError, RuntimeError):
    pass


class DeltaTooLarge(CritfanError, ValueError):
    pass


# root data / representations
class InvalidGroupSpec(CritfanError, ValueError):
    pass


class UnsupportedGroup(CritfanError, ValueError):
    pass


class InvalidRepresentation(CritfanError, ValueError):
    pass


class MixedSign(CritfanError, ValueError):
    pass


# arrangements
class CentralTorusActsTrivially(CritfanError):
    """A non-trivial central split torus acts trivially; treated as critical."""


class IrregularKernel(CritfanError):
    pass


class OutsideSupport(CritfanError, ValueError):
    pass


# numerics
class LatticeOverflow(CritfanError, OverflowError):
    pass


class GridTooShort(CritfanError, ValueError):
    pass


class OutsideRelint(CritfanError, ValueError):
    pass


class CriticalExponent(CritfanError, ValueError):
    pass


class QuadratureFailure(CritfanError, RuntimeError):
    pass


class UnsupportedForSimulation(CritfanError, ValueError):
    pass
