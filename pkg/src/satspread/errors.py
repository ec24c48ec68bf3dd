"""Shared error types separating configuration mistakes from scientific failures."""


class ScientificError(RuntimeError):
    """A computation finished but violated a model-level guarantee."""


class InvariantViolation(ScientificError):
    """A structural invariant (bounds, monotonicity) broke during a run."""


class BracketError(ScientificError):
    """Analytic speed bracket did not have the predicted endpoint signs."""
