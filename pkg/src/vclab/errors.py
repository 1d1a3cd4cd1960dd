"""Exception types shared across the solvers."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A run configuration is malformed or violates a parameter constraint."""


class CflError(RuntimeError):
    """A transport step was requested with dt violating the CFL bound."""


class StepFailureError(RuntimeError):
    """The per-step firing-rate fixed point failed to converge.

    Carries the iteration trace for diagnosis.
    """

    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = list(trace)


class IntegrationDivergedError(RuntimeError):
    """Time integration produced a non-finite state.

    ``last_state`` holds the last finite (t, b, c) triple.
    """

    def __init__(self, message: str, last_state: tuple[float, float, float]):
        super().__init__(message)
        self.last_state = last_state
