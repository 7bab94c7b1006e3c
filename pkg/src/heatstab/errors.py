"""Exception hierarchy.

Each error carries the process exit code the command-line front end uses
when it surfaces: 2 for configuration problems, 3 for infeasible designs,
4 for numeric faults.
"""


class HeatStabError(Exception):
    exit_code = 1


class ConfigError(HeatStabError, ValueError):
    exit_code = 2


class InvalidDomainError(ConfigError):
    pass


class TruncationError(ConfigError):
    """Mode truncation does not reach the requested decay rate."""


class DisturbanceBoundError(ConfigError):
    """Disturbance amplitude exceeds the bound D known to the controller."""


class InfeasibleDesignError(HeatStabError, ValueError):
    exit_code = 3


class InfeasibleRateError(InfeasibleDesignError):
    pass


class DegenerateSubdomainError(InfeasibleDesignError):
    pass


class NumericFaultError(HeatStabError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class NoFitError(HeatStabError, ValueError):
    exit_code = 4
