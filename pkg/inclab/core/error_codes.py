"""Error code definitions for unified error responses."""

class ErrorCode:
    # Validation errors (1xxx)
    INVALID_INPUT = ("INVALID_INPUT", "Invalid input parameters")
    INVALID_SCALE = ("INVALID_SCALE", "Scale exponent k out of range")
    INVALID_EXPONENT = ("INVALID_EXPONENT", "Exponent out of range")
    MIXED_RADII = ("MIXED_RADII", "Objects must share a common radius or width")
    LATTICE_VIOLATION = ("LATTICE_VIOLATION", "Ball centers must lie on the odd δ-lattice")
    SLOPE_OUT_OF_RANGE = ("SLOPE_OUT_OF_RANGE", "Tube midline slope must satisfy |m| <= 1")
    NOT_DISJOINT = ("NOT_DISJOINT", "Input δ-balls must be pairwise disjoint")
    TOO_FEW_ROWS = ("TOO_FEW_ROWS", "A slope fit needs at least four rows")
    INVALID_SIDE = ("INVALID_SIDE", "Square side must be a multiple of 2δ in [δ, 1]")

    # Region errors (2xxx)
    REGION_VIOLATION = ("REGION_VIOLATION", "Parameters outside the construction region")
    UNKNOWN_CONSTRUCTION = ("UNKNOWN_CONSTRUCTION", "Unknown construction id")

    # Guard errors (3xxx)
    SIZE_GUARD_EXCEEDED = ("SIZE_GUARD_EXCEEDED", "Instance exceeds the configured size guard")

    # Resource errors (4xxx)
    RESOURCE_NOT_FOUND = ("RESOURCE_NOT_FOUND", "Resource not found")
    SWEEP_RUN_NOT_FOUND = ("SWEEP_RUN_NOT_FOUND", "Sweep run not found")

    # System errors (9xxx)
    INTERNAL_ERROR = ("INTERNAL_ERROR", "Internal error")
    DATABASE_ERROR = ("DATABASE_ERROR", "Database error")


class BusinessException(Exception):
    """Domain exception with error code."""

    def __init__(self, error_code: tuple[str, str], details: str = None):
        self.code = error_code[0]
        self.message = error_code[1]
        self.details = details
        super().__init__(self.message if details is None else f"{self.message}: {details}")
