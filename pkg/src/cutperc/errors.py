"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates an operation's stated precondition."""


class SizeCapError(ContractError):
    """An exact computation would exceed the enumeration cap."""
