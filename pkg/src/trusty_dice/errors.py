"""Exception hierarchy shared by all modules.

The CLI maps ``ValidationError``/``DomainError`` to exit code 2 and
``CapacityError`` to exit code 3.
"""


class TrustyDiceError(Exception):
    pass


class ValidationError(TrustyDiceError, ValueError):
    """Malformed input: wrong lengths, non-finite numbers, bad files."""


class DomainError(TrustyDiceError, ValueError):
    """Input is well formed but outside the operation's domain."""


class InsufficientDataError(DomainError):
    def __init__(self, total_weight: float, required: float):
        self.total_weight = total_weight
        self.required = required
        super().__init__(
            f"insufficient data for one group: total weight {total_weight:.6g} "
            f"< required minimum {required:.6g}"
        )


class CapacityError(TrustyDiceError, RuntimeError):
    """Exhaustive work would exceed the configured budget."""

    def __init__(self, work: int, budget: int, what: str = "enumeration"):
        self.work = work
        self.budget = budget
        super().__init__(f"{what} needs {work} steps, budget is {budget}")
