"""Exception types shared across the package."""


class StaticGeoError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(StaticGeoError):
    """Invalid or degenerate model parameters (bad dimension, a = 0, ...)."""


class ConstraintError(StaticGeoError):
    """A case constraint between supplied constants fails; message shows both sides."""


class ProfileSingularityError(StaticGeoError):
    """The profile touched the singular set of its equation.

    The message names the offending factor and its value.
    """


class StepTooCoarseError(StaticGeoError):
    """First-integral drift over the grid exceeded the integration tolerance."""


class RegularityError(StaticGeoError):
    """An operation that needs f' != 0 was given a grid where it vanishes."""


class DegenerateGridError(StaticGeoError):
    """The sample grid for a least-squares fit produced singular normal equations."""


class ScenarioError(StaticGeoError):
    """A scenario file failed to parse or validate; message names section/key."""
