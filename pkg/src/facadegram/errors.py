"""Exception types shared across the package."""


class FacadegramError(Exception):
    """Base class for all errors raised by this package."""


class LayoutParseError(FacadegramError):
    """Layout file is malformed."""


class LayoutValidationError(FacadegramError):
    """Layout violates a tiling invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid layout: " + "; ".join(str(v) for v in self.violations))


class GrammarParseError(FacadegramError):
    """Grammar file is malformed; carries line and column."""

    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class GrammarError(FacadegramError):
    """Structural grammar problem: incompleteness, duplicate rules, cycles."""


class ExpansionError(FacadegramError):
    """Rule sizes are incompatible with the region extent."""


class DerivationError(FacadegramError):
    """Grammar could not be derived (size mismatch, depth limit)."""


class UnexplainableLayoutError(FacadegramError):
    """No candidate rule could split some region in any iteration."""


class InfeasibleConstraintError(FacadegramError):
    """Equality constraint system is inconsistent."""

    def __init__(self, message, constraint_ids=()):
        self.constraint_ids = tuple(constraint_ids)
        super().__init__(message)


class ResizeError(FacadegramError):
    """A rule cannot be stretched or shrunk to the requested extent."""

    def __init__(self, message, rule_lhs=None):
        self.rule_lhs = rule_lhs
        super().__init__(message)


class MaterialMismatchError(FacadegramError):
    """Operation requires grammars/layouts with identical material tables."""
