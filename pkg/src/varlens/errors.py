"""Exception types shared across the toolkit."""


class VarlensError(Exception):
    """Base class for all errors raised by this package."""


class UnknownLabel(VarlensError):
    def __init__(self, raw: str, scheme: str):
        super().__init__(f"label {raw!r} is not in the {scheme!r} vocabulary")
        self.raw = raw
        self.scheme = scheme


class UnknownCategory(VarlensError):
    def __init__(self, raw: str):
        super().__init__(f"{raw!r} is not a taxonomy category")
        self.raw = raw


class ParseError(VarlensError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class ConflictingItemText(VarlensError):
    def __init__(self, item_id: str):
        super().__init__(f"item {item_id!r} has conflicting premise or hypothesis text")
        self.item_id = item_id


class DimMismatch(VarlensError):
    pass


class DuplicateKey(VarlensError):
    def __init__(self, key: str):
        super().__init__(f"duplicate sidecar key {key!r}")
        self.key = key


class WrongArity(VarlensError):
    def __init__(self, got: int, expected: int = 4):
        super().__init__(f"expected {expected} labels, got {got}")
        self.got = got
        self.expected = expected


class EmptyInput(VarlensError):
    pass


class MultiLabelRecord(VarlensError):
    def __init__(self, item_id: str, annotator_id: str):
        super().__init__(
            f"record {item_id!r}/{annotator_id!r} carries multiple labels under strict_single"
        )
        self.item_id = item_id
        self.annotator_id = annotator_id


class TooFewRecords(VarlensError):
    def __init__(self, item_id: str, got: int, needed: int = 2):
        super().__init__(f"item {item_id!r} has {got} records, needs at least {needed}")
        self.item_id = item_id
        self.got = got
        self.needed = needed


class TooFewInstances(VarlensError):
    def __init__(self, n: int, min_n: int):
        super().__init__(f"{n} instances available, minimum is {min_n}")
        self.n = n
        self.min_n = min_n


class MissingSidecar(VarlensError):
    def __init__(self, key: str):
        super().__init__(f"no sidecar entry for key {key!r}")
        self.key = key


class ZeroVector(VarlensError):
    pass


class NoRecords(VarlensError):
    def __init__(self, annotator_id: str):
        super().__init__(f"annotator {annotator_id!r} has no records passing the filter")
        self.annotator_id = annotator_id


class TooFewAnnotators(VarlensError):
    def __init__(self, got: int, needed: int):
        super().__init__(f"dataset has {got} annotators, needs at least {needed}")
        self.got = got
        self.needed = needed


class NoEligibleItems(VarlensError):
    pass


class UnknownItem(VarlensError):
    def __init__(self, item_id: str):
        super().__init__(f"item {item_id!r} not found in any supplied dataset")
        self.item_id = item_id


class UnsupportedFormat(VarlensError):
    def __init__(self, fmt: str):
        super().__init__(f"unsupported output format {fmt!r}")
        self.fmt = fmt


class InvalidProfile(VarlensError):
    pass


class UnknownField(VarlensError):
    def __init__(self, names):
        ordered = ", ".join(sorted(names))
        super().__init__(f"field map refers to unknown canonical fields: {ordered}")
        self.names = tuple(sorted(names))
