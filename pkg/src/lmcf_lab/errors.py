"""Exception types shared across the package."""

from __future__ import annotations


class LmcfLabError(Exception):
    """Base class for all package-specific errors."""


class DegenerateCurveError(LmcfLabError):
    """Curve too short or too coarse to operate on."""


class SingularAngleError(LmcfLabError):
    """Lagrangian angle requested at an interior node sitting on the origin."""


class BranchCutError(LmcfLabError):
    """Square-root branch undefined (line through the origin)."""


class SingularForcingError(LmcfLabError):
    """Forcing term 1/|z|^2 evaluated at an off-pin node on the origin."""


class UnsupportedSurgeryError(LmcfLabError):
    """Surgery requested on a loop that winds the origin."""


class NumericalBlowupError(LmcfLabError):
    """Non-finite values appeared during time stepping."""


class FlowStallError(LmcfLabError):
    """Time step collapsed below the useful resolution."""


class InfeasibleConstructionError(LmcfLabError):
    """No curve in the constructor family meets the requested bounds."""


class ShootingBracketError(LmcfLabError):
    """Shooting target has no sign change over the given bracket."""


class ScenarioConfigError(LmcfLabError):
    """Scenario file rejected (unknown key, bad type, bad value)."""
