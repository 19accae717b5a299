"""Exception hierarchy."""


class EntboundError(Exception):
    """Base class for all errors raised by entbound."""


class StructureError(EntboundError, ValueError):
    """Inconsistent tensor structure, bad subsystem index or wrong shape."""


class DomainError(EntboundError, ValueError):
    """A scalar argument lies outside the range an operation accepts."""


class SamplingError(EntboundError, RuntimeError):
    """A rejection sampler exhausted its attempt budget."""


class RecordFormatError(EntboundError, ValueError):
    """A matrix or measurement-record document could not be parsed.

    ``field`` names the offending entry (dotted path) and ``line`` is the
    1-based line in the source document when known.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
