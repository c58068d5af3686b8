"""Exception hierarchy shared by the library and the command line front end."""

from __future__ import annotations


class ConformalSplineError(Exception):
    """Base class for every error raised by this package."""


# -- mesh / geometry input -------------------------------------------------


class MeshError(ConformalSplineError):
    pass


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class IsolatedVertex(MeshError):
    pass


class DegenerateTriangle(ConformalSplineError):
    pass


class CoincidentPoints(ConformalSplineError):
    pass


class ZeroLengthEdge(ConformalSplineError):
    pass


class TriangleInequalityViolated(ConformalSplineError):
    def __init__(self, message: str, face: int | None = None):
        super().__init__(message)
        self.face = face


class SurfaceHasBoundary(ConformalSplineError):
    pass


class DuplicateRow(ConformalSplineError):
    pass


class DimensionMismatch(ConformalSplineError):
    pass


class OpenChain(ConformalSplineError):
    pass


class DegenerateSample(ConformalSplineError):
    pass


class UnbalancedFlux(ConformalSplineError):
    pass


# -- numerical failures of the solver ---------------------------------------


class NumericalFailure(ConformalSplineError):
    """Raised when an iterative solve gives up; ``state`` holds the best iterate."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class MaxIterations(NumericalFailure):
    pass


class LineSearchFailure(NumericalFailure):
    pass


class SingularKKT(NumericalFailure):
    pass


class SingularConfiguration(NumericalFailure):
    pass


# -- file input -------------------------------------------------------------


class InputError(ConformalSplineError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.path = path


class NonTriangleFace(ParseError):
    pass


class ValidationError(InputError):
    pass
