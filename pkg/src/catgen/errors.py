"""Exceptions shared by the integrators and the command-line driver."""


class InvariantViolation(RuntimeError):
    """A numerical invariant (norm, trace, positivity) drifted past its abort bound."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
