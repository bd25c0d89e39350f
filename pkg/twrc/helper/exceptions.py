class TwrcError(Exception):
    message = 'Rate region error!'

    def __init__(self, detail: str = None):
        super().__init__(detail or self.message)
        self.detail = detail or self.message


class DomainError(TwrcError, ValueError):
    message = 'Value outside the function domain!'


class WidthError(DomainError):
    message = 'Message width not representable!'


class PreconditionError(TwrcError):
    message = 'Precondition violated!'


class OutsideOuterBoundError(PreconditionError):
    message = 'Rate tuple outside the MAC-phase outer bound!'

    def __init__(self, violated, detail: str = None):
        self.violated = tuple(violated)
        labels = ", ".join(f"{label} (slack {value:.6g})" for label, value in self.violated)
        super().__init__(detail or f"{self.message[:-1]}: {labels}")


class CertificationError(TwrcError):
    message = 'Half-bit certificate failed verification!'

    def __init__(self, detail: str = None, repro: dict = None):
        super().__init__(detail)
        self.repro = repro or {}


class MalformedSnapshotError(TwrcError):
    message = 'Malformed relay snapshot!'
