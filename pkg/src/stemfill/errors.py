class BaseError(Exception):
    exit_code = 1  # Default to a generic failure

    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class ValidationError(BaseError):
    exit_code = 2

    def __init__(self, errors):
        self.errors = errors
        super().__init__(str(errors))


class DimensionMismatchError(ValidationError):
    def __init__(self, what, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"{what}: expected {expected}, got {got}")


class InvalidParameterError(ValidationError):
    def __init__(self, name, value, constraint):
        self.name = name
        self.value = value
        super().__init__(f"Invalid {name}={value!r}: {constraint}")


class StorageError(BaseError):
    exit_code = 3


class MalformedHeaderError(StorageError):
    pass


class TruncatedPayloadError(StorageError):
    def __init__(self, path, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(
            f"Truncated payload in {path}: expected {expected} bytes, got {got}"
        )


class TrailingPayloadError(StorageError):
    def __init__(self, path, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(
            f"Trailing bytes in {path}: expected {expected} bytes, got {got}"
        )


class DimensionOverflowError(StorageError):
    pass


class NumericalError(BaseError):
    exit_code = 4


class NonFiniteError(NumericalError):
    pass


class DegenerateInputError(NumericalError):
    pass


class LambdaSearchError(NumericalError):
    def __init__(self, side, message):
        self.side = side
        super().__init__(f"unreachable-{side}: {message}")
