"""Exception types shared across the package."""


class PhonalignError(Exception):
    """Base class for all errors raised by phonalign."""


class ParseError(PhonalignError, ValueError):
    """A file or string did not match its expected format."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OOVError(PhonalignError, KeyError):
    """One or more words are missing from the pronunciation dictionary."""

    def __init__(self, words):
        if isinstance(words, str):
            words = [words]
        self.words = list(words)
        super().__init__(self.words)

    def __str__(self):
        return "out-of-vocabulary word(s): " + ", ".join(repr(w) for w in self.words)


class InfeasibleAlignmentError(PhonalignError, ValueError):
    """The transcription has more symbols than there are frames."""


class LabelMismatchError(PhonalignError, ValueError):
    """Reference and hypothesis tiers do not carry the same label sequence."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)
