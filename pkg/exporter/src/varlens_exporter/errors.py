"""Exception types raised by the exporter."""


class ExportError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ExportError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateKey(ExportError):
    def __init__(self, key: str):
        super().__init__(f"duplicate record key {key!r}")
        self.key = key


class EncoderUnavailable(ExportError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"encoder {name!r} is not available: {reason}")
        self.name = name
        self.reason = reason


class UnknownTagset(ExportError):
    def __init__(self, name: str):
        super().__init__(f"unknown tagset {name!r}")
        self.name = name
