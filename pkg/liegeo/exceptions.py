"""
Error hierarchy shared by every liegeo module.

Each error carries a module-qualified `code` (for example
`surface_invariants.DegenerateSurface`) and, where it makes sense, the grid
node or sample index at which the violated invariant was first seen.
"""


class LiegeoError(Exception):
    module = "liegeo"
    exit_code = 1

    def __init__(self, message="", location=None):
        super().__init__(message)
        self.message = message
        self.location = location

    @property
    def code(self):
        return f"{self.module}.{type(self).__name__}"

    def __str__(self):
        where = f" at {self.location}" if self.location is not None else ""
        return f"[{self.code}] {self.message}{where}"


class ValidationFailure(LiegeoError):
    """
    The input violates a documented invariant.
    """
    exit_code = 2


class NumericalFailure(LiegeoError):
    """
    The input is well-formed but the computation cannot proceed.
    """
    exit_code = 3


# lie_core

class LieCoreValidation(ValidationFailure):
    module = "lie_core"


class LieCoreNumerical(NumericalFailure):
    module = "lie_core"


class NondecodableQuadricPoint(LieCoreValidation):
    pass


class NonUnitNormal(LieCoreValidation):
    pass


class InvalidQuadricPoint(LieCoreValidation):
    pass


class InvalidContactElement(LieCoreValidation):
    pass


class InvalidGroupElement(LieCoreValidation):
    pass


class InvalidAlgebraElement(LieCoreValidation):
    pass


class SignatureFailure(LieCoreNumerical):
    pass


class SignAlignmentFailure(LieCoreNumerical):
    pass


# surface_invariants

class SurfaceValidation(ValidationFailure):
    module = "surface_invariants"


class SurfaceNumerical(NumericalFailure):
    module = "surface_invariants"


class InvalidSurfaceGrid(SurfaceValidation):
    pass


class NotCurvatureLineCoordinates(SurfaceValidation):
    pass


class InvalidLegendreSurface(SurfaceValidation):
    pass


class UmbilicPoint(SurfaceNumerical):
    pass


class DegenerateSurface(SurfaceNumerical):
    pass


class StalkCollapse(SurfaceNumerical):
    pass


class IllConditionedCoframe(SurfaceNumerical):
    pass


# legendre_curves

class CurveValidation(ValidationFailure):
    module = "legendre_curves"


class CurveNumerical(NumericalFailure):
    module = "legendre_curves"


class InvalidLegendreCurve(CurveValidation):
    pass


class InsufficientOrder(CurveValidation):
    pass


class FatnessFailure(CurveNumerical):
    pass


class NotLinearlyFull(CurveNumerical):
    pass


class NotPolarized(CurveNumerical):
    pass


class StepFailure(CurveNumerical):
    pass


# eds_engine

class NotIntegralElement(ValidationFailure):
    module = "eds_engine"


# cauchy_solver

class CharacteristicData(ValidationFailure):
    module = "cauchy_solver"


class OrderSolveFailure(NumericalFailure):
    module = "cauchy_solver"


class WindowTooLarge(ValidationFailure):
    module = "cauchy_solver"


# cli

class InvalidRunConfig(ValidationFailure):
    module = "cli"
