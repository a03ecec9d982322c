"""Exception hierarchy shared across the engine."""


class MedreasonError(Exception):
    """Base class for all engine errors."""


class CorpusError(MedreasonError):
    """Raised when an input corpus is unusable (e.g. no valid symptom names)."""


class MatrixFormatError(MedreasonError):
    """Raised on malformed disease-matrix input; carries the offending cell."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RuleSyntaxError(MedreasonError):
    """Syntax error in rule source, with 1-based line/column and the bad token."""

    def __init__(self, message, line, column, token=""):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.token = token


class RuleSafetyError(MedreasonError):
    """Rule references a variable that no plain body atom can bind."""


class BuiltinError(MedreasonError):
    """Unknown builtin predicate or wrong builtin arity."""


class ExplanationError(MedreasonError):
    """Requested an explanation for an assertion that is not in the store."""


class VocabularyMismatchError(MedreasonError):
    """A model/index was built against a different symptom vocabulary."""


class ModelFormatError(MedreasonError):
    """Persisted model document is malformed or unsupported."""


class SymptomResolutionError(MedreasonError):
    """None of the reported symptom phrases resolved to a known symptom."""


class PatientValidationError(MedreasonError):
    """Patient document violates the record contract (bad age, sex, etc.)."""
