"""Shared exception types."""


class SolverConvergenceError(RuntimeError):
    """An iterative or convex solve failed to reach its tolerance."""
