"""Exception hierarchy shared by the library and the CLI."""


class LabError(Exception):
    """Base class for every error the laboratory raises on purpose."""

    exit_code: int = 1
    kind: str = "lab_error"

    def to_dict(self) -> dict:
        """Machine-readable form printed by the CLI."""
        return {"error": self.kind, "message": str(self), "exit_code": self.exit_code}


class InvalidConfigError(LabError, ValueError):
    """A digit set, flag or precondition is invalid."""

    exit_code = 2
    kind = "invalid_config"


class BudgetExceededError(LabError):
    """A configured desk budget would be exceeded; nothing partial is returned."""

    exit_code = 3
    kind = "budget_exceeded"


class ReportIOError(LabError, OSError):
    """Writing a report or cache entry failed."""

    exit_code = 4
    kind = "io_error"


class MajorArcDenominatorError(InvalidConfigError):
    """Denominator has no prime factor coprime to the base."""

    kind = "major_arc_denominator"


class DegenerateCollisionError(InvalidConfigError):
    """Two representations share the same prime multiset."""

    kind = "degenerate_collision"


class DensityError(InvalidConfigError):
    """Sieve density or exponential-sum weights out of range."""

    kind = "density_error"


def check_budget(name: str, value: int | float, limit: int | float) -> None:
    """Raise BudgetExceededError when value exceeds limit."""
    if value > limit:
        raise BudgetExceededError(f"{name}={value} exceeds budget {limit}")
