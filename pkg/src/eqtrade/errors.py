"""Exception types shared across the package."""


class EqTradeError(Exception):
    """Base class for every error raised by eqtrade."""


class InvalidProblem(EqTradeError, ValueError):
    pass


class InvalidTradeGraph(EqTradeError, ValueError):
    """Raised when a trade graph breaks one of its invariants.

    ``violations`` holds the :class:`~eqtrade.solver.Violation` records.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid trade graph: {shown}{more}")


class NotAbsorbing(EqTradeError, ValueError):
    pass


class DegenerateBlock(EqTradeError, ArithmeticError):
    pass


class NonTermination(EqTradeError, RuntimeError):
    pass


class InvalidLambda(EqTradeError, ValueError):
    pass


class Infeasible(EqTradeError, ValueError):
    pass


class NotExAnteStable(EqTradeError, ValueError):
    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        super().__init__(f"assignment is not ex-ante stable: {self.witnesses[:3]}")


class CyclePresent(EqTradeError, RuntimeError):
    pass


class TiesPresent(EqTradeError, ValueError):
    pass


class TooManyObjects(EqTradeError, ValueError):
    pass


class DimensionMismatch(EqTradeError, ValueError):
    pass


class IncompatibleMechanism(EqTradeError, ValueError):
    pass


class DocumentError(EqTradeError, ValueError):
    """An instance or trace document failed to parse.

    ``issues`` holds ``(code, path, message)`` triples where ``code`` is one
    of SchemaError, UnknownModel, BadRational, DanglingIdentifier or
    InvariantViolation and ``path`` is a JSON-pointer-like string.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        shown = "; ".join(f"{c} at {p or '/'}: {m}" for c, p, m in self.issues[:5])
        super().__init__(shown)

    @property
    def codes(self) -> list:
        return [c for c, _, _ in self.issues]
