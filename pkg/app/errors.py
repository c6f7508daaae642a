class CenterKitError(Exception):
    exit_code = 1


class CocoParseError(CenterKitError):
    exit_code = 2

    def __init__(self, message: str, *, byte_offset: int | None = None) -> None:
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset


class ReferentialIntegrityError(CocoParseError):
    def __init__(self, kind: str, missing_id: int, annotation_id: int | None = None) -> None:
        where = f" in annotation {annotation_id}" if annotation_id is not None else ""
        super().__init__(f"unknown {kind} {missing_id}{where}")
        self.kind = kind
        self.missing_id = missing_id


class ConfigError(CenterKitError):
    exit_code = 2


class StorageError(CenterKitError):
    exit_code = 3


class RasterFormatError(CenterKitError):
    exit_code = 4


class UnresolvedReferenceError(CenterKitError):
    exit_code = 5

    def __init__(self, offenders: list[str]) -> None:
        super().__init__("unresolvable prediction references: " + ", ".join(offenders))
        self.offenders = offenders


class ShapeMismatchError(CenterKitError, ValueError):
    pass


class DomainError(CenterKitError, ValueError):
    pass


class NonDifferentiableError(CenterKitError, ValueError):
    pass


class EmptyInputError(CenterKitError, ValueError):
    pass


class OracleSizeError(CenterKitError, ValueError):
    pass


class NonFiniteCostError(CenterKitError, ValueError):
    pass


class PointsParseError(CenterKitError):
    exit_code = 2

    def __init__(self, message: str, *, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
