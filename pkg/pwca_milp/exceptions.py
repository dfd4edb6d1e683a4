"""
Custom exceptions for pwca-milp
"""


class PwcaError(Exception):
    """Base exception for all toolkit errors"""
    pass


class ConfigurationError(PwcaError):
    """Raised when configuration is invalid"""
    pass


class ParameterError(PwcaError):
    """Raised when operation parameters are inconsistent (lengths, counts, parity)"""
    pass


class GeometryError(PwcaError):
    """Base class for rotation/hyperplane construction errors"""
    pass


class InvalidDimensionError(GeometryError):
    """Raised when a dimension count is below the supported minimum"""
    pass


class DegeneratePlaneError(GeometryError):
    """Raised when a plane has a zero normal or is vertical in y"""
    pass


class OptimizerError(PwcaError):
    """Raised when the minimizer cannot run"""
    pass


class InvalidStartError(OptimizerError):
    """Raised when the objective is not finite at the starting point"""
    pass


class FitError(PwcaError):
    """Base class for fitting failures"""
    pass


class UnderdeterminedError(FitError):
    """Raised when there are too few data points for the requested model"""
    pass


class BandTooNarrowError(FitError):
    """Raised when the interface band selects too few data points"""
    pass


class DegenerateModelError(FitError):
    """Raised when a fitted pair of planes is degenerate"""

    def __init__(self, message: str, pair_index: int = -1):
        super().__init__(message)
        self.pair_index = pair_index


class TranslationError(PwcaError):
    """Base class for MILP translation errors"""
    pass


class UnboundedBigMError(TranslationError):
    """Raised when a big-M value cannot be computed because a bound is infinite"""
    pass


class FormulationError(TranslationError):
    """Raised when a formulation is not applicable to the given model"""
    pass


class NamingError(TranslationError):
    """Raised on missing, invalid or colliding variable names"""
    pass


class TriangulationError(PwcaError):
    """Base class for triangulation errors"""
    pass


class ExtrapolationError(TriangulationError):
    """Raised when vertex values would have to be extrapolated"""
    pass


class DomainError(TriangulationError):
    """Raised when a point lies outside the triangulated domain"""
    pass


class SolverError(PwcaError):
    """Raised when a problem cannot be handed to the solver"""
    pass


class DataFormatError(PwcaError):
    """Raised when a dataset, model or LP file is malformed"""
    pass


class ExportError(PwcaError):
    """Raised when export operation fails"""
    pass
