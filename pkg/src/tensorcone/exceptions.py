class NumericalFailure(ArithmeticError):
    """An iterate became non-finite or an algorithm diverged."""


class FormatError(ValueError):
    """A text file does not follow its declared format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
