"""Exception hierarchy shared by every module."""


class LinLogError(Exception):
    """Base class for all errors raised by linlog."""


# -- syntax ---------------------------------------------------------------

class ParseError(LinLogError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ForbiddenSymbol(ParseError):
    def __init__(self, symbol, lang, position=None):
        self.symbol = symbol
        self.lang = lang
        super().__init__(f"symbol {symbol!r} is not part of language {lang.value}", position)


class IntuitionisticArity(ParseError):
    def __init__(self, count):
        self.count = count
        super().__init__(f"intuitionistic sequents need exactly one succedent formula, got {count}")


# -- kernel ---------------------------------------------------------------

class KernelError(LinLogError):
    pass


class NotApplicable(KernelError):
    pass


class DisabledRule(KernelError):
    def __init__(self, rule, system):
        self.rule = rule
        self.system = system
        super().__init__(f"rule {rule.value} is disabled in {system}")


class MalformedNode(KernelError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        super().__init__(f"node {list(self.path)}: {reason}")


class LanguageViolation(KernelError):
    def __init__(self, formula, system):
        self.formula = formula
        self.system = system
        super().__init__(f"formula {formula} is outside the language of {system}")


class CutMismatch(KernelError):
    pass


class ProofFormatError(KernelError, ValueError):
    pass


# -- translations ---------------------------------------------------------

class TranslationError(LinLogError):
    pass


class NotCLLProof(TranslationError):
    pass


class UnsupportedCut(NotCLLProof):
    pass


class RootMismatch(TranslationError):
    pass


# -- machines and encoder -------------------------------------------------

class MachineError(LinLogError):
    pass


class AtTerminal(MachineError):
    pass


class MachineFormatError(MachineError, ValueError):
    pass


class UnknownState(MachineError):
    pass


class NotAccepted(MachineError):
    pass


class UnknownLabel(MachineError, KeyError):
    pass


# -- phase semantics ------------------------------------------------------

class PhaseError(LinLogError):
    pass


class InvalidSpace(PhaseError, ValueError):
    pass


class UnboundAtom(PhaseError, KeyError):
    pass


class ModelFormatError(PhaseError, ValueError):
    pass


class PremiseNotTrue(PhaseError, ValueError):
    pass


# -- search ---------------------------------------------------------------

class NotMALL(LinLogError, ValueError):
    pass
