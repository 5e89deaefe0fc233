"""Exception types raised across the package."""


class CvStabError(Exception):
    """Base class for all package errors."""


class RingMismatchError(CvStabError, ValueError):
    """Two objects live over different (n, d) and cannot be combined."""


class ContradictionError(CvStabError):
    """A forced measurement outcome has zero probability, or a group contains -I."""


class NotProductError(CvStabError):
    """A qudit cannot be discarded because it is entangled with the rest."""


class NonCliffordGate(CvStabError):
    """The circuit contains a gate this framework does not recognise as Clifford.

    This is a classification result, not a hardness claim.
    """

    def __init__(self, label, line=None, reason=""):
        self.label = label
        self.line = line
        self.reason = reason
        where = f" (line {line})" if line is not None else ""
        extra = f": {reason}" if reason else ""
        super().__init__(f"non-Clifford gate '{label}'{where}{extra}")


class MethodTwoInputViolation(CvStabError):
    """Method-two RSB embedding requires every input to be the j=0 codeword."""

    def __init__(self, mode, j, line=None):
        self.mode = mode
        self.j = j
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(
            f"method two needs |0> inputs, mode {mode} starts in |{j}>{where}"
        )


class GateNotAdmitted(CvStabError):
    """A gate does not match the resolved embedding plan."""


class ParseError(CvStabError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)


class SqueezingInsufficient(CvStabError):
    """Too much grid probability falls outside the homodyne bins."""


class AliasingError(CvStabError):
    """Grid sampling cannot represent the state without wrap-around."""


class TruncationError(CvStabError):
    """Fock truncation loses more norm than allowed."""
