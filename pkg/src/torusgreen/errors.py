"""Exception hierarchy.

Every error carries a stable machine-readable ``name`` which the CLI emits
in its error JSON.  Extra context goes into ``details``.
"""

from __future__ import annotations


class TorusGreenError(Exception):
    name = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": self.name, "message": self.message}
        for key, value in self.details.items():
            if isinstance(value, (int, float, str, bool)) or value is None:
                out[key] = value
            elif isinstance(value, complex):
                out[key] = [value.real, value.imag]
            else:
                out[key] = repr(value)
        return out


class InvalidTau(TorusGreenError, ValueError):
    name = "invalid_tau"


class NonFiniteInput(TorusGreenError, ValueError):
    name = "non_finite_input"


class PoleProximity(TorusGreenError, ValueError):
    name = "pole_proximity"


class BoundaryIndeterminate(TorusGreenError):
    """A fixed point is within the neutrality band; ``report`` holds the result."""

    name = "boundary_indeterminate"

    def __init__(self, message: str, report=None, **details):
        super().__init__(message, **details)
        self.report = report


class SolverIncomplete(TorusGreenError):
    name = "solver_incomplete"

    def __init__(self, message: str, report=None, **details):
        super().__init__(message, **details)
        self.report = report


class NotAFixedPoint(TorusGreenError, ValueError):
    name = "not_a_fixed_point"


class DegenerateCriticalPoint(TorusGreenError):
    name = "degenerate_critical_point"


class AuditFailed(TorusGreenError):
    name = "audit_failed"


class TrivialSolution(TorusGreenError, ValueError):
    name = "trivial_solution"


class NoNontrivialSolution(TorusGreenError):
    name = "no_nontrivial_solution"


class StencilSingularity(TorusGreenError, ValueError):
    name = "stencil_crosses_singularity"


class FitFailure(TorusGreenError, ValueError):
    name = "fit_failure"


class TruncationInsufficient(TorusGreenError):
    name = "truncation_insufficient"


class PrecisionWarning(UserWarning):
    """q-series evaluated at a nome too close to the unit circle."""
