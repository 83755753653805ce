"""Exception hierarchy for the task generation engine.

Everything raised on purpose derives from EngineError so callers can
catch engine failures without swallowing programming mistakes.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-level failures."""


class MalformedJson(EngineError):
    """Input text is not valid task JSON (syntax, structure, or cell types)."""


class GridBoundsViolation(EngineError):
    """Grid dimensions outside 1..30 or a cell value outside 0..9."""


class EmptySplit(EngineError):
    """An episode with no train pairs or no test pairs."""


class OutOfBounds(EngineError):
    """A composed cell landed outside the target grid."""


class DegenerateResult(EngineError):
    """An operation produced an unusable result (empty grid, ambiguous pick)."""


class InsufficientPalette(EngineError):
    """More distinct colors requested than the palette can supply."""


class BudgetExhausted(EngineError):
    """Rejection sampling ran out of attempts."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class UnknownPrimitive(EngineError):
    """Program references an operation missing from the primitive table."""


class DslTypeError(EngineError):
    """Program failed type checking (arity or argument type mismatch)."""


class UnboundVariable(EngineError):
    """Evaluation or inlining hit a variable with no binding."""


class ParseError(EngineError):
    """Program text could not be parsed."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class TemplateError(EngineError):
    """A reasoning template slot could not be resolved."""

    def __init__(self, message: str, line_index: int, slot: str):
        super().__init__(message)
        self.line_index = line_index
        self.slot = slot


class UnknownGenerator(EngineError):
    """Lookup of a generator id not present in the registry."""


class MissingManifest(EngineError):
    """Dataset directory has no manifest file."""


class OrphanSidecar(EngineError):
    """Sidecar file present for a sample the manifest does not list."""


class ArityMismatch(EngineError):
    """Prediction entry has the wrong number of grids for its sample."""


class UnknownSampleId(EngineError):
    """Prediction entry references a sample id absent from the dataset."""


class GeneratorSetMismatch(EngineError):
    """Score tables being combined cover different generator sets."""
