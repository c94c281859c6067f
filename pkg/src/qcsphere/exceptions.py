"""Exception types raised by qcsphere."""


class MeshFormatError(ValueError):
    """A mesh file could not be parsed into a triangle mesh."""


class MeshValidationError(ValueError):
    """A mesh violates a topological precondition (closed, oriented, genus 0)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateFaceError(ValueError):
    """A face has (near) zero area so its local geometry is undefined."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class SolverError(RuntimeError):
    """A sparse linear solve failed or did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonManifoldError(RuntimeError):
    """An induced triangulation is not a closed oriented 2-manifold."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StageError(RuntimeError):
    """Wraps a failure inside a multi-stage pipeline with the stage name.

    The original exception is available as ``__cause__`` and ``cause``.
    """

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
