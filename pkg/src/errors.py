"""
errors - Exception hierarchy shared by the forms6, lattice, flow, stability and cli packages.
Every error carries the structured context needed to locate the failure and the
process exit code the command-line front end maps it to.
"""


class IIAError(Exception):
    """Base class for all failures raised by the laboratory."""

    # Input that does not describe a valid structure unless a subclass says otherwise
    exit_code = 2

    def __init__(self, message, **context):
        self.context = {key: value for key, value in context.items() if value is not None}
        if self.context:
            details = ", ".join(f"{key}={value}" for key, value in self.context.items())
            message = f"{message} ({details})"
        super().__init__(message)

    @property
    def location(self):
        return self.context.get("location")

    @property
    def time(self):
        return self.context.get("time")

    @property
    def stage(self):
        return self.context.get("stage")


class NotPositiveError(IIAError):
    """A 3-form does not induce an almost-complex structure, or a metric is not positive definite."""

    exit_code = 2


class PrimitivityError(IIAError):
    """phi ^ omega does not vanish where the pair is required to be primitive."""

    exit_code = 2


class OrientationError(IIAError):
    """omega^3 does not match the fixed orientation e^123456."""

    exit_code = 2


class DegenerateError(IIAError):
    """Positivity lost during a flow, or a singular Lefschetz solve."""

    exit_code = 4

    def __init__(self, message, trajectory=None, **context):
        super().__init__(message, **context)
        self.trajectory = trajectory


class NotExactError(IIAError):
    """A form handed to the Neumann operator has a harmonic part or is not closed."""

    exit_code = 2


class StepUnderflowError(IIAError):
    """Time step (or particle step) fell below the minimum admissible size."""

    exit_code = 4

    def __init__(self, message, trajectory=None, **context):
        super().__init__(message, **context)
        self.trajectory = trajectory


class TooFarError(IIAError):
    """The perturbation left the basin in which the constructions are valid."""

    exit_code = 5


class NonConvergenceError(IIAError):
    """A flow did not reach stationarity within its time budget."""

    exit_code = 5


class ConstraintError(IIAError):
    """A variation does not satisfy the closedness constraint it was promised to."""

    exit_code = 2


class ConfigError(IIAError):
    """Manifest or command-line validation failure."""

    exit_code = 2


class InvariantSuiteError(IIAError):
    """One or more identity suites failed."""

    exit_code = 3
