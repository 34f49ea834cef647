"""Exception types raised across the package."""


class SeqAssocError(Exception):
    """Base class for all package errors."""


class InputFormatError(SeqAssocError, ValueError):
    pass


class CountError(SeqAssocError, ValueError):
    """Counts handed to a contingency table are mutually inconsistent."""


class MergeError(SeqAssocError, ValueError):
    pass


class IndexLoadError(SeqAssocError, ValueError):
    def __init__(self, section, message):
        super().__init__(f"[{section}] {message}")
        self.section = section


class SequenceNotFound(SeqAssocError, KeyError):
    pass
