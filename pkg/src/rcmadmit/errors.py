"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid configuration input (bad file, bad field, bad units)."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        prefix = ""
        if field is not None:
            prefix = f"{field}: "
        if line is not None:
            prefix = f"line {line}: " + prefix
        super().__init__(prefix + message)


class AlignmentError(ConfigError):
    """Initial tool axis does not pass through the entry port."""


class SingularityError(Exception):
    """Kinematics too close to a singularity for the constraint maps."""


class ConstraintViolationError(Exception):
    """Tool reached a covering sphere; the barrier potential is infinite there.

    The control law guarantees this cannot happen in a well-configured run,
    so raising it signals an integration or setup problem.
    """

    def __init__(self, distance, point_index, message=None):
        self.distance = distance
        self.point_index = point_index
        if message is None:
            message = (
                f"forbidden region violated: distance {distance:.6g} m at "
                f"cloud point {point_index}"
            )
        super().__init__(message)


class FaultStopError(Exception):
    """Non-finite state or unrecoverable numeric failure during a step."""
