"""Exception hierarchy shared by every stage of the interpreter."""


class BraidError(Exception):
    """Base class for all interpreter errors."""


class ParseError(BraidError):
    def __init__(self, message, line=0, column=0, expected=()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.bare_message = message
        where = f"{line}:{column}" if line else "end of input"
        text = f"parse error at {where}: {message}"
        if self.expected:
            text += "; expected one of " + ", ".join(sorted(self.expected))
        super().__init__(text)


class DesugarError(BraidError):
    pass


class EvalError(BraidError):
    """A runtime error raised while evaluating kernel code."""


class DepthExceeded(EvalError):
    pass


class BootstrapError(EvalError):
    pass
