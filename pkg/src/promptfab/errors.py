"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class PromptFabError(Exception):
    """Base class for all errors raised by this package."""


class MalformedFile(PromptFabError):
    """Mesh file is truncated, unparseable, or references missing data."""


class EmptyMesh(PromptFabError):
    """A mesh has no triangles (possibly after degenerate cleanup)."""


class NonClassifiable(PromptFabError):
    """Point-in-mesh parity could not be resolved after all retry rays."""


class DegenerateBounds(PromptFabError):
    """Mesh bounding box has zero extent along the scaling axis."""


class EmptyResult(PromptFabError):
    """Voxelization produced no occupied cell at the given threshold."""


class NotGrounded(PromptFabError):
    """Operation requires a single grounded connected component."""


class NoConvergence(PromptFabError):
    """Inverse kinematics did not reach tolerance within the iteration cap.

    Carries the best configuration found and its residual errors.
    """

    def __init__(self, message, best_q=None, position_error=None, orientation_error=None):
        super().__init__(message)
        self.best_q = best_q
        self.position_error = position_error
        self.orientation_error = orientation_error


class JointLimit(PromptFabError):
    """A converged IK solution violates the arm's joint limits."""


class Unplannable(PromptFabError):
    """Assembly planning exhausted its backtracking budget.

    ``cell`` is the first unplaceable cell and ``reason`` is one of
    ``unreachable``, ``blocked``, or ``unsupported``.
    """

    def __init__(self, message, cell=None, reason=None):
        super().__init__(message)
        self.cell = cell
        self.reason = reason


class InsufficientComponents(PromptFabError):
    """Inventory does not hold enough free components for the allocation."""


class DuplicateObject(PromptFabError):
    """An object id is already allocated in the inventory ledger."""


class UnknownObject(PromptFabError):
    """An object id has no allocation in the inventory ledger."""


class ProviderUnavailable(PromptFabError):
    """A remote AI provider could not be reached or refused the request."""


class UnintelligibleAudio(PromptFabError):
    """Speech transcription got audio it cannot turn into text."""


class BadRequest(PromptFabError):
    """A job request is invalid (e.g. empty prompt)."""


class WrongState(PromptFabError):
    """A job operation was attempted in a state that does not allow it."""
