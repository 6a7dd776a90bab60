class SymplecticIndexError(Exception):
    """Base class; `code` is the reason string reported in place of a value."""

    code = "error"


class NotSymplectic(SymplecticIndexError):
    code = "not_symplectic"


class PolarFailure(SymplecticIndexError):
    code = "polar_failure"


class BranchCut(SymplecticIndexError):
    code = "branch_cut"


class NotIsotropic(SymplecticIndexError):
    code = "not_isotropic"


class RankDeficient(SymplecticIndexError):
    code = "rank_deficient"


class NotTransversal(SymplecticIndexError):
    code = "not_transversal"


class IntegralityViolation(SymplecticIndexError):
    code = "integrality_violation"

    def __init__(self, what: str, value: float, residual: float):
        super().__init__(f"{what}: {value!r} is not integral (residual {residual:.3e})")
        self.value = value
        self.residual = residual


class AuxiliarySearchFailed(SymplecticIndexError):
    code = "auxiliary_search_failed"


class UnknownGenerator(SymplecticIndexError):
    code = "unknown_generator"


class NotALoop(SymplecticIndexError):
    code = "not_a_loop"


class UnderResolved(SymplecticIndexError):
    code = "under_resolved"


class DegenerateEndpoint(SymplecticIndexError):
    code = "degenerate_endpoint"


class NotFree(SymplecticIndexError):
    code = "not_free"


class PathExtensionFailed(SymplecticIndexError):
    code = "path_extension_failed"


class OrbitNotClosed(SymplecticIndexError):
    code = "orbit_not_closed"


class SymplecticDriftExceeded(SymplecticIndexError):
    code = "symplectic_drift_exceeded"


class UnknownSuite(SymplecticIndexError):
    code = "unknown_suite"


class SchemaError(SymplecticIndexError):
    code = "schema_error"
