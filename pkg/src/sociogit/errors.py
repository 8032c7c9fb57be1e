"""Exception hierarchy shared by all sociogit modules."""


class SociogitError(Exception):
    """Base class for all errors raised by this package."""


class NotARepository(SociogitError):
    """The given path does not contain a Git object database."""


class IoError(SociogitError):
    """An underlying file could not be read or written."""


class CorruptObject(SociogitError):
    """A Git object is missing, truncated, or cannot be decoded."""


class UnknownBranch(SociogitError):
    """One or more requested branches do not exist.

    The missing names are available as the ``missing`` attribute.
    """

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("unknown branch(es): %s" % ", ".join(self.missing))


class FileNotInTree(SociogitError):
    """The requested path is absent from the commit's tree."""


class BinaryFile(SociogitError):
    """Line-level access was requested for a binary blob."""


class EmptyEntity(SociogitError):
    """An empty string was passed where an entity name is required."""


class DimensionMismatch(SociogitError):
    """Two matrices do not share the id space they are combined over."""


class EmptyGraph(SociogitError):
    """A graph calculation received a graph with no nodes."""


class ConfigError(SociogitError):
    """A run configuration is invalid (maps to CLI exit code 2)."""
