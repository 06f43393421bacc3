"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input."""


class DivergenceError(InputError):
    """A series-based bound was requested outside its region of convergence."""


class CapExceeded(RuntimeError):
    """Exhaustive enumeration refused because the candidate count is above the cap."""

    def __init__(self, count, cap):
        super().__init__(f"{count} candidate subsets exceeds enumeration cap {cap}")
        self.count = count
        self.cap = cap


class InvariantViolation(RuntimeError):
    """A property that must hold by construction was observed to fail."""


class TrivialInstance(Exception):
    """A reduction input that is answered directly instead of being reduced.

    ``answer`` holds the decision for the original instance.
    """

    def __init__(self, reason, answer):
        super().__init__(reason)
        self.reason = reason
        self.answer = answer
