class LfdGfError(Exception):
    """Base class for all errors raised by lfdgf."""


class SignatureError(LfdGfError):
    """A formula, model or signature violates its well-formedness invariants."""


class ParseError(LfdGfError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)
        self.pos = pos


class SizeCapError(LfdGfError):
    """A configured resource cap was exceeded."""


class PreconditionError(LfdGfError):
    pass
