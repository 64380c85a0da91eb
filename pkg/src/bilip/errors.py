"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (unknown vertex, bad file, bad args)."""


class ConstructionError(RuntimeError):
    """A generator could not satisfy its constraints (budget, infeasible degree)."""


class ResolutionExhausted(InputError):
    """A net was requested below the resolution of the model space."""

    def __init__(self, message, max_level):
        super().__init__(message)
        self.max_level = max_level


class NoBoundedMatching(RuntimeError):
    """Promotion failed for every radius up to r_max.

    Signals failing hypotheses on the inputs (no linear isoperimetric
    inequality, or a map too far from any bijection), not a bug.
    """

    def __init__(self, r_max, unsaturated):
        super().__init__(
            f"no interior-saturating matching up to radius {r_max} "
            f"({unsaturated} interior vertices left unmatched at r_max)"
        )
        self.r_max = r_max
        self.unsaturated = unsaturated
