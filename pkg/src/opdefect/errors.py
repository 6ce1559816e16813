"""Exception hierarchy.

Every error carries a stable ``code`` string; the CLI prints it verbatim in
its machine-readable error object.
"""


class OpDefectError(Exception):
    code = "ERROR"


class ContractViolation(OpDefectError, ValueError):
    """Input does not satisfy an operation's precondition (shape, Hermitian, ...)."""

    code = "CONTRACT_VIOLATION"


class DimensionMismatch(ContractViolation):
    code = "DIM_MISMATCH"


class DomainError(OpDefectError, ValueError):
    """Input is well-formed but outside the operation's mathematical domain."""

    code = "DOMAIN_ERROR"


class ConsistencyError(OpDefectError, ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""

    code = "CONSISTENCY_ERROR"


class IllConditionedDecomposition(OpDefectError, ArithmeticError):
    """Eigenvalues fall inside the clustering ambiguity band."""

    code = "ILL_CONDITIONED_DECOMPOSITION"
