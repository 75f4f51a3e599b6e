class DecompkitError(Exception):
    pass


class ParseFailed(DecompkitError):
    pass


class CollisionError(DecompkitError):
    """Source already holds a placeholder-shaped token that would alias a generated one."""


class InvertFailed(DecompkitError):
    pass


class ToolchainMissing(DecompkitError):
    pass


class ProviderUnavailable(DecompkitError):
    pass


class BackendUnavailable(DecompkitError):
    pass


class JudgeUnavailable(DecompkitError):
    pass


class RatingUnparseable(DecompkitError):
    pass


class AmbiguousTarget(DecompkitError):
    pass


class EmptyInput(DecompkitError):
    pass


class TextTooShort(DecompkitError):
    pass


class IncompatibleScores(DecompkitError):
    """Scores computed under different R2I weight tables were mixed."""
