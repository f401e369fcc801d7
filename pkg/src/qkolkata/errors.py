"""Exception types shared across the engine."""


class ContractViolation(ValueError):
    """An argument broke a documented precondition (bad shape, range, or flag)."""


class NumericalIntegrityError(ArithmeticError):
    """A computed quantity violated a tolerance that should hold by construction."""
