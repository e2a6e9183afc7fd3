"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QtomoError(Exception):
    """Base class for all library errors."""


class MalformedError(QtomoError, ValueError):
    """A line sum array or tensor violates a structural bound."""


class ShapeMismatchError(QtomoError, ValueError):
    """Two objects that must share a shape do not."""


class IncompatibleError(QtomoError):
    """The input fails the compatibility criterion; carries the verdict."""

    def __init__(self, verdict):
        super().__init__(str(verdict))
        self.verdict = verdict


class NotRealizable(QtomoError):
    """A complete search proved that no (symmetric) realization exists."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class BorderInconsistency(NotRealizable):
    """A line lying entirely in the peeled border has the wrong sum."""


class ExhaustionError(QtomoError):
    """Switch repair could not reach the budget box within its step bound."""


class BudgetExceeded(QtomoError):
    """The oracle hit its node cap before deciding the instance."""

    def __init__(self, nodes):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


class GuardExceeded(QtomoError, ValueError):
    """An exhaustive enumeration was requested on too large a space."""


class InternalError(QtomoError):
    """A branch that the construction argument says is unreachable was hit.

    ``code`` names the broken invariant so tests can tell gaps apart.
    """

    def __init__(self, code, message):
        super().__init__(f"[{code}] {message}")
        self.code = code
