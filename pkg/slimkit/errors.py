"""Exception hierarchy shared by every slimkit module."""

from typing import ClassVar


class SlimkitError(Exception):
    """Base class for all slimkit errors.

    ``exit_code`` is the status the CLI returns when the error escapes a
    command: 1 for invariant or verification failures, 2 for usage and
    configuration problems.
    """

    exit_code: ClassVar[int] = 1


class ConstructionError(SlimkitError):
    """A topology cannot be built from the given parameters."""

    exit_code: ClassVar[int] = 2


class CapacityError(SlimkitError):
    """The unicast LID space cannot hold the requested assignment."""


class ConfigError(SlimkitError):
    """A configuration file, price table or flag combination is invalid."""

    exit_code: ClassVar[int] = 2


class SchemaError(SlimkitError):
    """An artifact file has the wrong kind or schema version."""

    exit_code: ClassVar[int] = 2


class LayerGenerationError(SlimkitError):
    """Routing layers could not be generated."""

    def __init__(self, message: str, layer: int | None = None) -> None:
        """Record the index of the layer that failed, when known."""
        super().__init__(message)
        self.layer = layer


class DeadlockSchemeError(SlimkitError):
    """A deadlock-avoidance scheme cannot be applied to the given routing."""


class VlExhaustedError(DeadlockSchemeError):
    """No virtual lane can take a path without closing a dependency cycle."""

    def __init__(self, message: str, path: tuple[int, int, int]) -> None:
        """Record the unplaceable path as ``(layer, src, dst)``."""
        super().__init__(message)
        self.path = path


class ColoringError(DeadlockSchemeError):
    """A proper switch coloring needs more colors than there are SLs."""


class FabricError(SlimkitError):
    """Forwarding tables are inconsistent with the routing they implement."""


class ForwardingLoopError(FabricError):
    """A route walk exceeded its hop limit."""


class DeadEndError(FabricError):
    """A route walk reached a switch without an entry for the DLID."""


class DemandError(SlimkitError):
    """A traffic demand cannot be routed with the given layers."""

    exit_code: ClassVar[int] = 2


class DumpSyntaxError(SlimkitError):
    """A discovery dump line does not match the grammar."""

    exit_code: ClassVar[int] = 2

    def __init__(self, message: str, line: int, col: int) -> None:
        """Prefix the message with the 1-indexed line and column."""
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DumpSemanticError(SlimkitError):
    """A discovery dump is well-formed but describes an impossible fabric."""

    exit_code: ClassVar[int] = 2

    def __init__(self, message: str, lines: tuple[int, ...]) -> None:
        """Cite every offending line in the message."""
        cited = ", ".join(str(line) for line in lines)
        super().__init__(f"lines {cited}: {message}")
        self.lines = lines
