"""Exception hierarchy shared by every module of the package."""


class QTorsionError(Exception):
    """Base class for all errors raised by qtorsion."""


class PolytopeError(QTorsionError):
    """Malformed or invalid combinatorial polytope input."""


class LatticeError(QTorsionError):
    """Exact linear algebra precondition failure (zero vector, dependence, ...)."""


class CharMapError(QTorsionError):
    """Characteristic map is structurally invalid (missing or non-primitive vector)."""


class ConstructionError(QTorsionError):
    """A blowup, blowdown or wedge could not be built."""


class ProductStructureError(ConstructionError):
    """No (or no unique) decomposition of a facet as face x simplex.

    ``candidates`` holds every verified candidate facet index when the
    failure is due to ambiguity; it is empty when nothing verified.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)

    @property
    def ambiguous(self):
        return len(self.candidates) > 1


class BlowdownError(ConstructionError):
    """The collapsed polytope fails validation (no simple blowdown exists)."""


class WedgeParameterError(ConstructionError):
    """Wedge characteristic parameter is forbidden (a == 1)."""


class RestrictionError(QTorsionError):
    """Transported characteristic map is not R-characteristic on the blowdown."""

    def __init__(self, message, vertex=None, det=None):
        super().__init__(message)
        self.vertex = vertex
        self.det = det


class RetractionError(QTorsionError):
    """A proposed step is not a valid retraction step."""


class SchemaError(QTorsionError):
    """Input JSON does not match the expected file format."""
