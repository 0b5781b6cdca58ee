"""Exception hierarchy shared by all modules."""


class RepairAlignError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class DomainMismatchError(RepairAlignError, ValueError):
    pass


class DimensionError(RepairAlignError, ValueError):
    pass


class SingularMatrixError(RepairAlignError, ArithmeticError):
    pass


class GenerationFailedError(RepairAlignError):
    """Random generation did not produce a valid instance within the retry bound."""


class InfeasibleStrategyError(RepairAlignError):
    """The useful-data (legitimate) space is not full rank."""


class InconsistentContentsError(RepairAlignError):
    pass


class BudgetExceededError(RepairAlignError):
    pass


class NoFeasibleSolutionError(RepairAlignError):
    pass


class NumericalError(RepairAlignError, ArithmeticError):
    pass
