"""Exception types shared across the toolkit."""


class StampError(Exception):
    """Base class for toolkit errors."""


class FileFormatError(StampError):
    """A file does not parse as, or byte-match, its declared format."""


class IntegrityError(StampError):
    """A dataset or structure violates a referential/value invariant."""
